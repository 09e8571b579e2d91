import { ApiClient } from "./api";
import { ExplorerApp } from "./app";

const apiBase =
  new URLSearchParams(window.location.search).get("api") ??
  "http://127.0.0.1:8000";

const root = document.querySelector<HTMLElement>("#app");
if (!root) {
  throw new Error("missing #app mount point");
}
const app = new ExplorerApp(root, new ApiClient(apiBase));
void app.init();
