import { defineConfig } from "vitest/config";

// solver runs spawn the CLI; give them generous timeouts
export default defineConfig({
  test: {
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
