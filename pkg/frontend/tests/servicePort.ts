// Shared by vitest.config.ts (happy-dom document origin) and the global
// setup (where the service binds): the console page must be same-origin
// with the API for the browser environment's fetch to allow it.
export const SERVICE_PORT = 8471;
export const SERVICE_BASE = `http://127.0.0.1:${SERVICE_PORT}`;
