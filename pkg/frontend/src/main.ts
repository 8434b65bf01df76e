/** Entry point: pick the first project (or the one from the URL hash)
 * and mount the workbench. */

import { HttpApiClient } from './api.js';
import { App } from './app.js';

async function boot(): Promise<void> {
  const base = ''; // same origin; front the API or serve behind one host
  const api = new HttpApiClient(base);
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');

  let projectId = window.location.hash.replace(/^#/, '');
  if (!projectId) {
    const res = await fetch(`${base}/projects`);
    const body = (await res.json()) as { projects: { projectId: string }[] };
    if (!body.projects.length) {
      root.textContent =
        'No projects yet. Create one with: lvlinker ingest <log.jsonl> --manifest <videos.json>';
      return;
    }
    projectId = body.projects[0].projectId;
  }
  const app = new App(root, api, projectId);
  await app.start();
}

void boot();
