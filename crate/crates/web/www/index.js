import init, { specialize, classGroup, scanPrimes } from "./pkg/ellclass_web.js";

const $ = (id) => document.getElementById(id);
const curve = () => ["a", "b", "x", "y"].map((k) => $(k).value.trim());

function show(summaryId, text, isError = false) {
  const el = $(summaryId);
  el.textContent = text;
  el.className = isError ? "error" : "";
}

function guarded(summaryId, f) {
  return () => {
    try {
      f();
    } catch (e) {
      show(summaryId, e.message ?? String(e), true);
    }
  };
}

function runSpecialize() {
  const r = JSON.parse(specialize(...curve(), $("p").value.trim()));
  $("specialize-out").textContent = JSON.stringify(r, null, 2);
  if (r.status !== "Ok") {
    show("specialize-summary", `d = ${r.d}: ${r.status}`);
    return;
  }
  const v = r.verdict;
  const verdict = v.nontrivial ? "not principal" : "principal";
  show(
    "specialize-summary",
    `d = ${r.d}, ideal [${r.ideal.norm}, ${r.ideal.root} + √${r.d}] is ${verdict}; ` +
      `h = ${v.h_wide} (narrow ${v.h_narrow}) for discriminant ${v.headline_discriminant}`,
  );
}

function plot(rows) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const ok = rows.filter((r) => r.status === "Ok" && r.h_wide !== null);
  if (ok.length === 0) return;
  const pMax = Number(ok[ok.length - 1].p);
  const hMax = Math.max(...ok.map((r) => Number(r.h_wide)));
  const pad = 30;
  const sx = (p) => pad + ((width - 2 * pad) * p) / pMax;
  // log scale keeps small class numbers visible next to large ones
  const sy = (h) => height - pad - ((height - 2 * pad) * Math.log(h)) / Math.log(Math.max(hMax, 2));
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, height - pad);
  ctx.lineTo(width - pad, height - pad);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(`h_wide (log), max ${hMax}`, pad + 4, pad - 8);
  ctx.fillText(`p ≤ ${pMax}`, width - pad - 50, height - 8);
  for (const r of ok) {
    const x = sx(Number(r.p));
    const y = sy(Number(r.h_wide));
    ctx.fillStyle = r.nontrivial ? "#c0392b" : "#95a5a6";
    ctx.fillRect(x - 1.5, Math.min(y, height - pad - 3), 3, Math.max(height - pad - y, 3));
  }
}

function runScan() {
  const items = JSON.parse(scanPrimes(...curve(), Number($("pmax").value)));
  const summary = items.pop();
  plot(items);
  const listed = summary.nontrivial_primes.slice(0, 20).join(", ");
  const more = summary.nontrivial_primes.length > 20 ? ", …" : "";
  show(
    "scan-summary",
    `${summary.primes_considered} primes, ${summary.ok_count} specialized, ` +
      `${summary.nontrivial_count} with a non-principal class` +
      (listed ? ` (p = ${listed}${more})` : ""),
  );
}

function runClassGroup() {
  const r = JSON.parse(classGroup($("delta").value.trim()));
  show(
    "classgroup-summary",
    `Δ = ${r.delta}: h_narrow = ${r.h_narrow}, h_wide = ${r.h_wide}, ` +
      `${r.reduced_form_count} reduced forms` +
      (r.norm_minus_one_unit ? ", unit of norm −1" : ""),
  );
  $("classgroup-out").textContent = r.cycles
    .map((c, i) => `${i === 0 ? "principal" : `class ${i}`}: ` + c.map((f) => `(${f.join(", ")})`).join(" → "))
    .join("\n");
}

await init();
$("run-specialize").addEventListener("click", guarded("specialize-summary", runSpecialize));
$("run-scan").addEventListener("click", guarded("scan-summary", runScan));
$("run-classgroup").addEventListener("click", guarded("classgroup-summary", runClassGroup));
guarded("specialize-summary", runSpecialize)();
guarded("classgroup-summary", runClassGroup)();
