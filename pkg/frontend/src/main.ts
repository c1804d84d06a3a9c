import { ApiClient } from "./api.js";
import { renderGraphSvg } from "./graph.js";
import { SessionController } from "./model.js";
import type { NetworkDoc } from "./types.js";

const api = new ApiClient("");
const controller = new SessionController(api);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let networkDoc: NetworkDoc | null = null;

function setStatus(text: string, isError = false): void {
  const el = $("status-line");
  el.textContent = text;
  el.className = isError ? "error" : "";
}

function redraw(): void {
  if (!controller.state) return;
  const view = controller.view;
  $("graph").innerHTML = renderGraphSvg(view);
  $("round-counter").textContent =
    view.status === "complete"
      ? `complete after ${view.totalRounds} rounds`
      : `round ${view.round} of ${view.totalRounds}`;
  $("spread-estimate").textContent = view.spreadEstimate.toFixed(1);

  const panel = $("recommendation-panel");
  panel.style.display = view.status === "complete" ? "none" : "block";
  const rec = controller.recommendation;
  $("rec-nodes").textContent = rec
    ? rec.action.map((v) => view.nodes[v]?.label ?? v).join(", ")
    : "(none yet)";
  $("rec-spread").textContent =
    view.expectedSpread === null ? "" : `expected spread ${view.expectedSpread.toFixed(1)}`;
  ($("btn-recommend") as HTMLButtonElement).disabled = view.status !== "awaiting_recommendation";
  renderObservationForm();
}

function renderObservationForm(): void {
  const host = $("observation-form");
  const form = controller.form;
  if (!form) {
    host.innerHTML = "";
    ($("btn-submit") as HTMLButtonElement).disabled = true;
    return;
  }
  const view = controller.view;
  const label = (v: number) => view.nodes[v]?.label ?? String(v);
  const rows: string[] = ["<h3>attendance</h3>"];
  for (const v of form.action) {
    const checked = form.attended.includes(v) ? " checked" : "";
    rows.push(
      `<label><input type="checkbox" data-attend="${v}"${checked}/> ${label(v)} attended</label>`,
    );
  }
  rows.push("<h3>observed friendships</h3>");
  if (form.observableEdges.length === 0) {
    rows.push("<p>this action observes no uncertain edges</p>");
  }
  for (const eid of form.observableEdges) {
    const edge = view.edges.find((e) => e.id === eid);
    const desc = edge ? `${label(edge.src)} &rarr; ${label(edge.dst)}` : `edge ${eid}`;
    const val = form.edgeValue(eid);
    rows.push(
      `<div class="edge-row">#${eid} ${desc}: ` +
        `<label><input type="radio" name="edge-${eid}" data-edge="${eid}" data-exists="1"` +
        `${val === 1 ? " checked" : ""}/> exists</label> ` +
        `<label><input type="radio" name="edge-${eid}" data-edge="${eid}" data-exists="0"` +
        `${val === 0 ? " checked" : ""}/> absent</label></div>`,
    );
  }
  host.innerHTML = rows.join("\n");
  host.querySelectorAll("input[data-attend]").forEach((el) => {
    el.addEventListener("change", () => {
      const input = el as HTMLInputElement;
      form.setAttendance(Number(input.dataset["attend"]), input.checked);
    });
  });
  host.querySelectorAll("input[data-edge]").forEach((el) => {
    el.addEventListener("change", () => {
      const input = el as HTMLInputElement;
      form.setEdge(Number(input.dataset["edge"]), input.dataset["exists"] === "1");
      updateSubmit();
    });
  });
  updateSubmit();
}

function updateSubmit(): void {
  const form = controller.form;
  const btn = $("btn-submit") as HTMLButtonElement;
  btn.disabled = !form || !form.complete;
  $("missing-edges").textContent =
    form && !form.complete ? `missing: edges ${form.missingEdges.join(", ")}` : "";
}

async function guard(work: () => Promise<void>): Promise<void> {
  try {
    await work();
    setStatus("ok");
  } catch (err) {
    setStatus(String(err), true);
  }
  redraw();
}

function wire(): void {
  $("network-file").addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    file.text().then((text) => {
      try {
        networkDoc = JSON.parse(text) as NetworkDoc;
        setStatus(`loaded network with ${networkDoc.n_nodes} nodes`);
      } catch {
        setStatus("not a valid network file", true);
      }
    });
  });

  $("btn-create").addEventListener("click", () =>
    guard(async () => {
      if (!networkDoc) throw new Error("load a network file first");
      const config = {
        K: Number(($("cfg-k") as HTMLInputElement).value),
        T: Number(($("cfg-t") as HTMLInputElement).value),
        L: Number(($("cfg-l") as HTMLInputElement).value),
        planner: ($("cfg-planner") as HTMLSelectElement).value,
        seed: Number(($("cfg-seed") as HTMLInputElement).value),
      };
      const id = await controller.create(networkDoc, config);
      $("session-id").textContent = id;
      $("wizard").style.display = "none";
      $("session").style.display = "block";
    }),
  );

  $("btn-recommend").addEventListener("click", () =>
    guard(async () => {
      await controller.fetchRecommendation();
    }),
  );

  $("btn-submit").addEventListener("click", () =>
    guard(async () => {
      await controller.submit();
    }),
  );
}

wire();
