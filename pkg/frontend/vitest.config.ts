import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the round-trip suite builds a workspace and boots the real service
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
