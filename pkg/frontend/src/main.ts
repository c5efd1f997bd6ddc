import { ApiClient } from "./api";
import { mountConsole } from "./app";

const root = document.getElementById("console");
if (root) {
  void mountConsole(root, new ApiClient("/api")).catch((error) => {
    root.textContent = `Cannot reach the advisory service: ${error.message}`;
    root.className = "banner banner-error";
  });
}
