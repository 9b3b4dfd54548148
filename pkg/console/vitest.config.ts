import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
    // every file runs its own gateway subprocess; keeping files sequential
    // avoids starving the simulators' tick loops on small CI boxes
    fileParallelism: false,
  },
});
