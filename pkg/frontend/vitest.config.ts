import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'happy-dom',
    environmentOptions: {
      happyDOM: {
        url: 'http://localhost/',
        // The test server binds an arbitrary localhost port, so requests are
        // cross-origin from the document's point of view; the backend is ours,
        // no CORS dance needed.
        settings: { fetch: { disableSameOriginPolicy: true } },
      },
    },
    globalSetup: './tests/global-setup.ts',
    testTimeout: 30_000,
    hookTimeout: 90_000,
  },
});
