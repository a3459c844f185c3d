import { App } from './app';
import { buildConfig } from './config';
import { ApiClient } from './services/api';

const root = document.getElementById('app');
if (root) {
  const app = new App(root, new ApiClient(buildConfig()));
  void app.start();
}
