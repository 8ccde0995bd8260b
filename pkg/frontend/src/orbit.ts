import { PerspectiveCamera, Vector3 } from "three";

/**
 * Minimal orbit rig: drag rotates around the target, wheel zooms, right
 * drag pans. Camera state lives here and is never touched by scene swaps,
 * which is what keeps the viewpoint steady during playback.
 */
export class OrbitRig {
  readonly target = new Vector3(0, 0, 0);
  theta = Math.PI / 4;
  phi = Math.PI / 3.2;
  distance = 160;

  private dragging: "rotate" | "pan" | null = null;
  private lastX = 0;
  private lastY = 0;

  constructor(
    readonly camera: PerspectiveCamera,
    element: HTMLElement,
  ) {
    element.addEventListener("pointerdown", (e) => {
      this.dragging = e.button === 2 ? "pan" : "rotate";
      this.lastX = e.clientX;
      this.lastY = e.clientY;
      element.setPointerCapture(e.pointerId);
    });
    element.addEventListener("pointerup", () => (this.dragging = null));
    element.addEventListener("pointermove", (e) => this.onMove(e));
    element.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.distance *= e.deltaY > 0 ? 1.1 : 0.9;
      this.distance = Math.min(Math.max(this.distance, 10), 1200);
      this.apply();
    }, { passive: false });
    element.addEventListener("contextmenu", (e) => e.preventDefault());
    this.apply();
  }

  lookAtCity(width: number, depth: number): void {
    this.target.set(width / 2, 0, depth / 2);
    this.distance = Math.max(width, depth) * 1.6 + 40;
    this.apply();
  }

  private onMove(e: PointerEvent): void {
    if (!this.dragging) {
      return;
    }
    const dx = e.clientX - this.lastX;
    const dy = e.clientY - this.lastY;
    this.lastX = e.clientX;
    this.lastY = e.clientY;
    if (this.dragging === "rotate") {
      this.theta -= dx * 0.005;
      this.phi = Math.min(Math.max(this.phi - dy * 0.005, 0.05), Math.PI / 2 - 0.02);
    } else {
      const scale = this.distance * 0.0015;
      const sin = Math.sin(this.theta);
      const cos = Math.cos(this.theta);
      this.target.x -= (dx * cos - dy * sin) * scale;
      this.target.z -= (dx * sin + dy * cos) * scale;
    }
    this.apply();
  }

  apply(): void {
    const sinPhi = Math.sin(this.phi);
    this.camera.position.set(
      this.target.x + this.distance * sinPhi * Math.cos(this.theta),
      this.target.y + this.distance * Math.cos(this.phi),
      this.target.z + this.distance * sinPhi * Math.sin(this.theta),
    );
    this.camera.lookAt(this.target);
  }
}
