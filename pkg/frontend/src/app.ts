import {
  AmbientLight,
  DirectionalLight,
  Group,
  PerspectiveCamera,
  Raycaster,
  Scene,
  Vector2,
  WebGLRenderer,
} from "three";
import { ApiClient } from "./api";
import { applySelection, buildCityGroup } from "./city";
import { OrbitRig } from "./orbit";
import { InfoPanel } from "./panel";
import { Player, type PlaybackMode } from "./player";
import { Timeline } from "./timeline";
import type { SceneDocument } from "./types";

export interface AppElements {
  viewport: HTMLElement;
  timeline: HTMLElement;
  panel: HTMLElement;
  status: HTMLElement;
}

/**
 * Browser shell around the headless player: WebGL canvas, orbit camera,
 * click picking, timeline scrubber and info panel. Scene swaps replace one
 * group; camera and lights persist.
 */
export class CityApp {
  readonly player: Player;
  private readonly scene = new Scene();
  private readonly camera: PerspectiveCamera;
  private readonly renderer: WebGLRenderer;
  private readonly rig: OrbitRig;
  private readonly raycaster = new Raycaster();
  private readonly panel: InfoPanel;
  private timeline: Timeline | null = null;
  private city: Group | null = null;
  private framed = false;

  constructor(
    api: ApiClient,
    projectId: string,
    private readonly elements: AppElements,
  ) {
    this.camera = new PerspectiveCamera(
      50,
      elements.viewport.clientWidth / Math.max(elements.viewport.clientHeight, 1),
      0.1,
      5000,
    );
    this.renderer = new WebGLRenderer({ antialias: true });
    this.renderer.setSize(elements.viewport.clientWidth, elements.viewport.clientHeight);
    elements.viewport.appendChild(this.renderer.domElement);
    this.rig = new OrbitRig(this.camera, this.renderer.domElement);
    this.panel = new InfoPanel(elements.panel);

    this.scene.add(new AmbientLight(0xffffff, 0.7));
    const sun = new DirectionalLight(0xffffff, 1.2);
    sun.position.set(120, 260, 80);
    this.scene.add(sun);

    this.player = new Player(api, projectId, {
      onScene: (document, ordinal) => this.swapScene(document, ordinal),
      onSelect: (history) => {
        if (history) {
          this.panel.show(history, this.player.state.ordinal);
          this.timeline?.setMarks(history.touched);
        } else {
          this.panel.clear();
          this.timeline?.clearMarks();
        }
        if (this.city) {
          applySelection(this.city, this.player.state.selected);
        }
      },
    });

    this.renderer.domElement.addEventListener("click", (e) => this.pick(e));
    window.addEventListener("resize", () => this.resize());
    this.renderer.setAnimationLoop(() => this.renderer.render(this.scene, this.camera));
  }

  async start(): Promise<void> {
    await this.player.load();
    this.timeline = new Timeline(this.elements.timeline, this.player.timeline, {
      onSeek: (ordinal) => void this.player.seek(ordinal),
    });
    this.timeline.setCurrent(0);
  }

  setMode(mode: PlaybackMode): void {
    this.player.play(mode);
  }

  private swapScene(document: SceneDocument, ordinal: number): void {
    if (this.city) {
      this.scene.remove(this.city);
    }
    this.city = buildCityGroup(document);
    applySelection(this.city, this.player.state.selected);
    this.scene.add(this.city);
    this.timeline?.setCurrent(ordinal);

    const commit = document.commit;
    const date = new Date(commit.timestamp * 1000).toISOString().slice(0, 10);
    this.elements.status.textContent =
      `#${commit.ordinal} ${date} ${commit.author}: ${commit.subject}`;

    if (!this.framed && document.meshes.length > 0) {
      this.frameCity(document);
      this.framed = true;
    }
  }

  /** Point the camera at the root district once, on the first scene. */
  private frameCity(document: SceneDocument): void {
    const root = document.meshes.find((m) => m.glyph === "DistrictSlab" && m.path === "");
    if (root) {
      this.rig.lookAtCity(root.dimensions[0], root.dimensions[2]);
    }
  }

  private pick(event: MouseEvent): void {
    if (!this.city) {
      return;
    }
    const bounds = this.renderer.domElement.getBoundingClientRect();
    const point = new Vector2(
      ((event.clientX - bounds.left) / bounds.width) * 2 - 1,
      -((event.clientY - bounds.top) / bounds.height) * 2 + 1,
    );
    this.raycaster.setFromCamera(point, this.camera);
    const hits = this.raycaster.intersectObjects(this.city.children, false);
    const hit = hits.find((h) => h.object.userData.kind === "mesh");
    const id = hit?.object.userData.id as string | undefined;
    void this.player.select(id && !id.startsWith("table:") ? id : null);
  }

  private resize(): void {
    const { clientWidth, clientHeight } = this.elements.viewport;
    this.camera.aspect = clientWidth / Math.max(clientHeight, 1);
    this.camera.updateProjectionMatrix();
    this.renderer.setSize(clientWidth, clientHeight);
  }
}
