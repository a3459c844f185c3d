import { defineConfig } from 'vitest/config';

// The dev server proxies /api to a locally running model server so the
// page works without CORS flags; production builds bake the base URL in
// via VITE_API_BASE instead.
export default defineConfig({
  server: {
    proxy: {
      '/api': {
        target: process.env.VITE_PROXY_TARGET || 'http://127.0.0.1:8000',
        changeOrigin: true,
      },
    },
  },
  test: {
    environment: 'jsdom',
  },
});
