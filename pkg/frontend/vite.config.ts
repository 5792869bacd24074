import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // dev only; production builds are served by the service itself
    proxy: { "/api": "http://127.0.0.1:8000" },
  },
  test: {
    environment: "happy-dom",
  },
});
