// The embedding map: a pan/zoom canvas scatter with the pool's convex
// boundary. The geometry pipeline (data -> screen transforms, hit
// mapping) is pure so it can be profiled and tested without a DOM.

export interface ScatterView {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface ScatterData {
  points: [number, number][];
  boundary: [number, number][];
  highlighted?: number;
}

/** Fit the data extents into a width x height viewport with a margin. */
export function fitView(points: [number, number][], width: number,
                        height: number, margin = 24): ScatterView {
  let minU = Infinity, maxU = -Infinity, minV = Infinity, maxV = -Infinity;
  for (const [u, v] of points) {
    if (u < minU) minU = u;
    if (u > maxU) maxU = u;
    if (v < minV) minV = v;
    if (v > maxV) maxV = v;
  }
  const spanU = Math.max(maxU - minU, 1e-9);
  const spanV = Math.max(maxV - minV, 1e-9);
  const scale = Math.min((width - 2 * margin) / spanU, (height - 2 * margin) / spanV);
  return {
    scale,
    offsetX: margin - minU * scale + (width - 2 * margin - spanU * scale) / 2,
    offsetY: margin + maxV * scale + (height - 2 * margin - spanV * scale) / 2,
  };
}

export function toScreen(view: ScatterView, u: number, v: number): [number, number] {
  return [u * view.scale + view.offsetX, -v * view.scale + view.offsetY];
}

export function toData(view: ScatterView, x: number, y: number): [number, number] {
  return [(x - view.offsetX) / view.scale, -(y - view.offsetY) / view.scale];
}

export function zoomAt(view: ScatterView, x: number, y: number,
                       factor: number): ScatterView {
  const [u, v] = toData(view, x, y);
  const scale = view.scale * factor;
  return {
    scale,
    offsetX: x - u * scale,
    offsetY: y + v * scale,
  };
}

export function pan(view: ScatterView, dx: number, dy: number): ScatterView {
  return { ...view, offsetX: view.offsetX + dx, offsetY: view.offsetY + dy };
}

/** Minimal slice of CanvasRenderingContext2D the renderer needs; tests
 * substitute a call-counting stub. */
export interface DrawContext {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  closePath(): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
}

export function renderScatter(ctx: DrawContext, data: ScatterData,
                              view: ScatterView, width: number,
                              height: number): void {
  ctx.clearRect(0, 0, width, height);

  if (data.boundary.length > 1) {
    ctx.strokeStyle = "#222";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    const [x0, y0] = toScreen(view, data.boundary[0][0], data.boundary[0][1]);
    ctx.moveTo(x0, y0);
    for (let i = 1; i < data.boundary.length; i++) {
      const [x, y] = toScreen(view, data.boundary[i][0], data.boundary[i][1]);
      ctx.lineTo(x, y);
    }
    ctx.closePath();
    ctx.stroke();
  }

  ctx.fillStyle = "#4a7dbd";
  for (let i = 0; i < data.points.length; i++) {
    if (i === data.highlighted) continue;
    const [x, y] = toScreen(view, data.points[i][0], data.points[i][1]);
    ctx.beginPath();
    ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  if (data.highlighted !== undefined && data.highlighted >= 0) {
    const [u, v] = data.points[data.highlighted];
    const [x, y] = toScreen(view, u, v);
    ctx.fillStyle = "#d43f3f";
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

/** Wire a canvas element: pan on drag, wheel zoom, click -> data coords. */
export function attachScatter(canvas: HTMLCanvasElement, data: ScatterData,
                              onPick: (u: number, v: number) => void) {
  const ctx = canvas.getContext("2d") as unknown as DrawContext;
  let view = fitView(data.points, canvas.width, canvas.height);
  let dragging = false;
  let moved = false;
  let lastX = 0;
  let lastY = 0;

  const draw = () => renderScatter(ctx, data, view, canvas.width, canvas.height);

  canvas.addEventListener("mousedown", (event) => {
    dragging = true;
    moved = false;
    lastX = event.offsetX;
    lastY = event.offsetY;
  });
  canvas.addEventListener("mousemove", (event) => {
    if (!dragging) return;
    const dx = event.offsetX - lastX;
    const dy = event.offsetY - lastY;
    if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
    view = pan(view, dx, dy);
    lastX = event.offsetX;
    lastY = event.offsetY;
    draw();
  });
  canvas.addEventListener("mouseup", (event) => {
    dragging = false;
    if (!moved) {
      const [u, v] = toData(view, event.offsetX, event.offsetY);
      onPick(u, v);
    }
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    view = zoomAt(view, event.offsetX, event.offsetY,
                  event.deltaY < 0 ? 1.15 : 1 / 1.15);
    draw();
  });

  draw();
  return {
    redraw: draw,
    highlight(index: number) {
      data.highlighted = index;
      draw();
    },
  };
}
