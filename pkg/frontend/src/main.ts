/** Browser entry point: pick a dataset (?dataset=NAME or the first one the
 * server lists) and mount the app. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new ApiClient("");
  const datasets = await api.datasets();
  if (datasets.length === 0) {
    root.textContent = "No datasets are loaded.";
    return;
  }
  const requested = new URLSearchParams(window.location.search).get("dataset");
  const name = datasets.some((d) => d.name === requested) ? requested! : datasets[0].name;
  const app = new App(root, api, name);
  await app.init();
}

void boot();
