/// <reference types="vitest/config" />
import { defineConfig } from "vite";

export default defineConfig({
  build: {
    target: "es2020",
  },
  test: {
    environment: "jsdom",
  },
});
