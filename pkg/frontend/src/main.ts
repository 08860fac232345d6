import { mount } from './app.js';

// API base URL: ?api=http://host:port, else same origin.
const params = new URLSearchParams(window.location.search);
const base = params.get('api') ?? '';
const root = document.getElementById('configurator');
if (root === null) {
  throw new Error('missing #configurator mount point');
}
mount(root, base);
