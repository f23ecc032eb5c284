// Team structure graph: SVG node-link rendering shared by the wizard's
// click-to-link editor, the live status panel, and the reflection flow panel.
//
// Layout is a small force simulation; when hierarchical edges exist the human
// is pinned topmost and hierarchy depth biases the vertical position.

import { svgEl } from "./dom";
import type { EdgeKind, StructureEdge, TeamConfig } from "./types";

const WIDTH = 420;
const HEIGHT = 300;
const RADIUS = 24;

interface LayoutNode {
  id: string;
  x: number;
  y: number;
  pinned: boolean;
}

function hierarchyDepths(config: TeamConfig): Map<string, number> {
  const depths = new Map<string, number>();
  const children = new Map<string, string[]>();
  const hasParent = new Set<string>();
  for (const edge of config.edges) {
    if (edge.kind !== "hierarchical") continue;
    children.set(edge.a, [...(children.get(edge.a) ?? []), edge.b]);
    hasParent.add(edge.b);
  }
  const roots = [...children.keys()].filter((id) => !hasParent.has(id));
  const queue: { id: string; depth: number }[] = roots.map((id) => ({ id, depth: 0 }));
  const seen = new Set<string>();
  while (queue.length > 0) {
    const { id, depth } = queue.shift()!;
    if (seen.has(id)) continue;
    seen.add(id);
    depths.set(id, Math.max(depths.get(id) ?? 0, depth));
    for (const child of children.get(id) ?? []) queue.push({ id: child, depth: depth + 1 });
  }
  return depths;
}

export function layoutTeam(config: TeamConfig): Map<string, { x: number; y: number }> {
  const members = config.members.map((m) => m.member_id);
  const human = config.members.find((m) => m.kind === "human")?.member_id;
  const hierarchical = config.edges.some((e) => e.kind === "hierarchical");
  const depths = hierarchyDepths(config);
  const maxDepth = Math.max(0, ...depths.values());

  const nodes: LayoutNode[] = members.map((id, index) => {
    const angle = (2 * Math.PI * index) / Math.max(members.length, 1);
    return {
      id,
      x: WIDTH / 2 + Math.cos(angle) * 110,
      y: HEIGHT / 2 + Math.sin(angle) * 90,
      pinned: hierarchical && id === human,
    };
  });
  const byId = new Map(nodes.map((n) => [n.id, n]));
  if (hierarchical && human !== undefined) {
    const pinnedHuman = byId.get(human);
    if (pinnedHuman) {
      pinnedHuman.x = WIDTH / 2;
      pinnedHuman.y = 46;
    }
  }

  const links = config.edges
    .filter((e) => byId.has(e.a) && byId.has(e.b) && e.a !== e.b)
    .map((e) => ({ a: e.a, b: e.b }));

  for (let iteration = 0; iteration < 120; iteration++) {
    // pairwise repulsion
    for (const node of nodes) {
      if (node.pinned) continue;
      let fx = 0;
      let fy = 0;
      for (const other of nodes) {
        if (other === node) continue;
        const dx = node.x - other.x;
        const dy = node.y - other.y;
        const dist2 = Math.max(dx * dx + dy * dy, 60);
        fx += (dx / dist2) * 2600;
        fy += (dy / dist2) * 2600;
      }
      // spring toward linked nodes
      for (const link of links) {
        if (link.a !== node.id && link.b !== node.id) continue;
        const other = byId.get(link.a === node.id ? link.b : link.a)!;
        const dx = other.x - node.x;
        const dy = other.y - node.y;
        const dist = Math.max(Math.hypot(dx, dy), 1);
        const pull = (dist - 120) * 0.02;
        fx += (dx / dist) * pull * 20;
        fy += (dy / dist) * pull * 20;
      }
      // hierarchy bias: deeper members sit lower
      if (hierarchical) {
        const depth = depths.get(node.id);
        if (depth !== undefined) {
          const target = 46 + ((HEIGHT - 110) * depth) / Math.max(maxDepth, 1);
          fy += (target - node.y) * 0.6;
        }
      }
      node.x = Math.min(WIDTH - RADIUS, Math.max(RADIUS, node.x + fx * 0.01));
      node.y = Math.min(HEIGHT - RADIUS, Math.max(RADIUS, node.y + fy * 0.01));
    }
  }
  return new Map(nodes.map((n) => [n.id, { x: n.x, y: n.y }]));
}

export interface GraphHandlers {
  onNodeClick?: (memberId: string) => void;
  onEdgeClick?: (edge: StructureEdge) => void;
}

export interface GraphDecorations {
  badges?: Map<string, string>;
  selected?: string | null;
  edgeLabels?: Map<string, string>; // keyed "a->b"
}

export function renderTeamGraph(
  config: TeamConfig,
  handlers: GraphHandlers = {},
  decorations: GraphDecorations = {},
): SVGElement {
  const positions = layoutTeam(config);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "team-graph",
    role: "img",
  });

  const defs = svgEl("defs");
  const marker = svgEl("marker", {
    id: "arrow", viewBox: "0 0 10 10", refX: "22", refY: "5",
    markerWidth: "7", markerHeight: "7", orient: "auto-start-reverse",
  });
  marker.append(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#5b6470" }));
  defs.append(marker);
  svg.append(defs);

  for (const edge of config.edges) {
    const a = positions.get(edge.a);
    const b = positions.get(edge.b);
    if (!a || !b) continue;
    const line = svgEl("line", {
      x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
      class: `edge edge-${edge.kind}`,
    });
    if (edge.kind === "hierarchical") line.setAttribute("marker-end", "url(#arrow)");
    if (handlers.onEdgeClick) {
      line.classList.add("clickable");
      line.addEventListener("click", () => handlers.onEdgeClick?.(edge));
    }
    svg.append(line);
    const label = decorations.edgeLabels?.get(`${edge.a}->${edge.b}`);
    if (label) {
      const text = svgEl("text", {
        x: String((a.x + b.x) / 2),
        y: String((a.y + b.y) / 2 - 6),
        class: "edge-label",
        "text-anchor": "middle",
      });
      text.textContent = label;
      svg.append(text);
    }
  }

  for (const member of config.members) {
    const pos = positions.get(member.member_id);
    if (!pos) continue;
    const group = svgEl("g", {
      class: `node node-${member.kind}${decorations.selected === member.member_id ? " node-selected" : ""}`,
      "data-member": member.member_id,
    });
    group.append(
      svgEl("circle", { cx: String(pos.x), cy: String(pos.y), r: String(RADIUS) }),
    );
    const name = svgEl("text", {
      x: String(pos.x), y: String(pos.y + 4), "text-anchor": "middle", class: "node-name",
    });
    name.textContent = member.persona.name || member.member_id;
    group.append(name);
    const badge = decorations.badges?.get(member.member_id);
    if (badge) {
      const badgeText = svgEl("text", {
        x: String(pos.x), y: String(pos.y + RADIUS + 14), "text-anchor": "middle",
        class: "node-badge", "data-badge-for": member.member_id,
      });
      badgeText.textContent = badge;
      group.append(badgeText);
    }
    if (handlers.onNodeClick) {
      group.classList.add("clickable");
      group.addEventListener("click", () => handlers.onNodeClick?.(member.member_id));
    }
    svg.append(group);
  }
  return svg;
}

export function cycleEdgeKind(kind: EdgeKind): EdgeKind {
  return kind === "peer" ? "hierarchical" : "peer";
}
