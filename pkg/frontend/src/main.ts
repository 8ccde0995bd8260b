import { ApiClient } from "./api";
import { CityApp } from "./app";
import type { PlaybackMode } from "./player";

function required(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing #${id}`);
  }
  return element;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const apiBase = params.get("api") ?? "";
  const api = new ApiClient(apiBase);

  let projectId = params.get("project");
  if (!projectId) {
    const { projects } = await api.listProjects();
    const done = projects.find((p) => p.status === "done");
    if (!done) {
      required("status").textContent =
        "No analyzed projects. Run an analysis first, or pass ?project=<id>.";
      return;
    }
    projectId = done.project_id;
  }

  const app = new CityApp(api, projectId, {
    viewport: required("viewport"),
    timeline: required("timeline"),
    panel: required("panel"),
    status: required("status"),
  });
  await app.start();

  const modes: [string, PlaybackMode | "step-back" | "step-fwd"][] = [
    ["btn-fast-back", "fast-backward"],
    ["btn-back", "backward"],
    ["btn-step-back", "step-back"],
    ["btn-pause", "paused"],
    ["btn-step-fwd", "step-fwd"],
    ["btn-fwd", "forward"],
    ["btn-fast-fwd", "fast-forward"],
  ];
  for (const [id, mode] of modes) {
    required(id).addEventListener("click", () => {
      if (mode === "step-back") {
        app.player.pause();
        void app.player.step(-1);
      } else if (mode === "step-fwd") {
        app.player.pause();
        void app.player.step(1);
      } else {
        app.setMode(mode);
      }
    });
  }
}

boot().catch((error) => {
  const status = document.getElementById("status");
  if (status) {
    status.textContent = `Failed to start: ${error}`;
  }
  console.error(error);
});
