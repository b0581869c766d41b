// Orbitable 3-D hull view: the mirrored offset mesh under three.js with
// orbit/zoom/pan controls.

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import { HullSurface } from "./api.js";
import { meshBounds, meshFromOffsets } from "./meshing.js";

export interface HullViewer {
  show(surface: HullSurface): void;
  dispose(): void;
}

export function createHullViewer(container: HTMLElement): HullViewer {
  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setPixelRatio(Math.min(window.devicePixelRatio, 2));
  renderer.setSize(container.clientWidth, container.clientHeight);
  renderer.setClearColor(0x10151d);
  container.appendChild(renderer.domElement);

  const scene = new THREE.Scene();
  const camera = new THREE.PerspectiveCamera(
    45, container.clientWidth / Math.max(1, container.clientHeight), 0.1, 5000);
  camera.position.set(260, 160, 180);
  camera.up.set(0, 0, 1);

  const controls = new OrbitControls(camera, renderer.domElement);
  controls.enableDamping = true;
  controls.dampingFactor = 0.1;

  scene.add(new THREE.HemisphereLight(0xffffff, 0x303040, 0.9));
  const key = new THREE.DirectionalLight(0xffffff, 1.1);
  key.position.set(300, 200, 400);
  scene.add(key);

  let hull: THREE.Mesh | null = null;
  let frame = 0;

  function animate() {
    frame = requestAnimationFrame(animate);
    controls.update();
    renderer.render(scene, camera);
  }
  animate();

  return {
    show(surface: HullSurface) {
      if (hull) {
        scene.remove(hull);
        hull.geometry.dispose();
      }
      const mesh = meshFromOffsets(surface);
      const geometry = new THREE.BufferGeometry();
      geometry.setAttribute("position",
                            new THREE.BufferAttribute(mesh.positions, 3));
      geometry.setIndex(new THREE.BufferAttribute(mesh.indices, 1));
      geometry.computeVertexNormals();
      const material = new THREE.MeshStandardMaterial({
        color: 0x5a86c2,
        metalness: 0.1,
        roughness: 0.6,
        side: THREE.DoubleSide,
      });
      hull = new THREE.Mesh(geometry, material);
      scene.add(hull);

      const bounds = meshBounds(mesh);
      const centre = new THREE.Vector3(
        (bounds.min[0] + bounds.max[0]) / 2,
        (bounds.min[1] + bounds.max[1]) / 2,
        (bounds.min[2] + bounds.max[2]) / 2);
      controls.target.copy(centre);
      const span = Math.max(bounds.max[0] - bounds.min[0],
                            bounds.max[1] - bounds.min[1]);
      camera.position.set(centre.x + span * 0.7, centre.y - span * 0.7,
                          centre.z + span * 0.45);
      controls.update();
    },
    dispose() {
      cancelAnimationFrame(frame);
      renderer.dispose();
      container.removeChild(renderer.domElement);
    },
  };
}
