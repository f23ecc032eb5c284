import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    port: 5179,
    proxy: {
      // dev convenience: same-origin API calls
      "/api": {
        target: "http://127.0.0.1:8040",
        changeOrigin: true,
        rewrite: (path) => path.replace(/^\/api/, ""),
      },
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});
