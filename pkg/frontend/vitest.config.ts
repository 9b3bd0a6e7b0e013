import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: "./tests/setup/service.ts",
    testTimeout: 30000,
  },
});
