/**
 * Build-time configuration.
 *
 * VITE_API_BASE: origin of the model server, e.g. "http://10.0.0.5:8000".
 * Empty means same-origin (the dev server proxies /api there).
 * VITE_API_TOKEN: bearer token, only needed when the server requires one.
 */

export interface AppConfig {
  apiBase: string;
  apiToken: string;
}

export function buildConfig(): AppConfig {
  const env = import.meta.env ?? {};
  return {
    apiBase: env.VITE_API_BASE ?? '',
    apiToken: env.VITE_API_TOKEN ?? '',
  };
}
