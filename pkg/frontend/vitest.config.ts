import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: "./tests/gateway.setup.ts",
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
