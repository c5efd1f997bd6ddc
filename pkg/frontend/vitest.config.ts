import { defineConfig } from "vitest/config";

import { SERVICE_BASE } from "./tests/servicePort.ts";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        url: SERVICE_BASE,
      },
    },
    globalSetup: "./tests/globalSetup.ts",
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
