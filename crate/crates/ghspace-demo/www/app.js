import init, { analyze, distance, embed_space } from "./pkg/ghspace_demo.js";

const PRESETS = [
  ["{3,4,5} triangle", "0 3 4\n3 0 5\n4 5 0"],
  ["scaled x10", "0 30 40\n30 0 50\n40 50 0"],
  ["equilateral", "0 1 1\n1 0 1\n1 1 0"],
  ["two points", "0 1\n1 0"],
  ["one point", "0"],
  ["4 points", '{"labels": ["a","b","c","d"],\n "dist": [["0","2","6","5"],\n          ["2","0","7","4"],\n          ["6","7","0","3"],\n          ["5","4","3","0"]]}'],
];

const $ = (id) => document.getElementById(id);

function setupPresets() {
  for (const holder of document.querySelectorAll(".presets")) {
    const target = $(holder.dataset.target);
    for (const [name, text] of PRESETS) {
      const button = document.createElement("button");
      button.textContent = name;
      button.addEventListener("click", () => { target.value = text; });
      holder.appendChild(button);
    }
  }
  $("input-x").value = PRESETS[0][1];
  $("input-y").value = PRESETS[1][1];
}

function show(id, html) {
  const section = $(id);
  section.innerHTML = html;
  section.hidden = false;
}

function esc(text) {
  return String(text).replace(/[&<>"]/g, (c) =>
    ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" }[c]));
}

function num(v) {
  if (v.exact === v.decimal) return `<code>${esc(v.exact)}</code>`;
  return `<code>${esc(v.exact)}</code> <span class="hint">≈ ${esc(v.decimal)}</span>`;
}

function matrixTable(space) {
  const labels = space.labels;
  let html = '<table class="matrix"><tr><th></th>';
  html += labels.map((l) => `<th>${esc(l)}</th>`).join("");
  html += "</tr>";
  space.dist.forEach((row, i) => {
    html += `<tr><th>${esc(labels[i])}</th>`;
    html += row.map((v) => `<td>${esc(v)}</td>`).join("");
    html += "</tr>";
  });
  return html + "</table>";
}

// nu vector as dots on a number line
function nuLine(nu) {
  const values = nu.coords.map((c) => parseFloat(c.decimal));
  const min = Math.min(...values), max = Math.max(...values);
  const span = max - min || 1;
  const width = 560, pad = 30, h = 64;
  const xAt = (v) => pad + ((v - min) / span) * (width - 2 * pad);
  let svg = `<svg width="${width}" height="${h}" role="img" aria-label="nu vector">`;
  svg += `<line x1="${pad - 10}" y1="32" x2="${width - pad + 10}" y2="32" stroke="#d7dee6" stroke-width="2"/>`;
  values.forEach((v, t) => {
    const x = xAt(v);
    const pair = nu.pairs[t];
    svg += `<circle cx="${x}" cy="32" r="5" fill="#0b6e4f"/>`;
    svg += `<text x="${x}" y="18" text-anchor="middle" font-size="11">${esc(nu.coords[t].exact)}</text>`;
    svg += `<text x="${x}" y="52" text-anchor="middle" font-size="10" fill="#5c6b7a">(${pair[0] + 1},${pair[1] + 1})</text>`;
  });
  return svg + "</svg>";
}

// optimal correspondence as a bipartite graph
function bipartite(labelsX, labelsY, pairs) {
  const width = 420, rowGap = 40, pad = 24;
  const h = pad * 2 + rowGap * (Math.max(labelsX.length, labelsY.length) - 1);
  const yAt = (i, n) => pad + (h - 2 * pad) * (n === 1 ? 0.5 : i / (n - 1));
  let svg = `<svg width="${width}" height="${h}" role="img" aria-label="optimal correspondence">`;
  for (const [i, j] of pairs) {
    svg += `<line x1="120" y1="${yAt(i, labelsX.length)}" x2="300" y2="${yAt(j, labelsY.length)}"
            stroke="#0b6e4f" stroke-width="1.5" opacity="0.75"/>`;
  }
  labelsX.forEach((l, i) => {
    const y = yAt(i, labelsX.length);
    svg += `<circle cx="120" cy="${y}" r="4" fill="#1b2430"/>`;
    svg += `<text x="108" y="${y + 4}" text-anchor="end" font-size="12">${esc(l)}</text>`;
  });
  labelsY.forEach((l, j) => {
    const y = yAt(j, labelsY.length);
    svg += `<circle cx="300" cy="${y}" r="4" fill="#1b2430"/>`;
    svg += `<text x="312" y="${y + 4}" font-size="12">${esc(l)}</text>`;
  });
  return svg + "</svg>";
}

function runAnalyze() {
  const out = JSON.parse(analyze($("input-x").value));
  if (out.error) return show("out-analyze", `<h2>Analyze X</h2><p class="error">${esc(out.error)}</p>`);
  let html = `<h2>Analyze X</h2><dl class="kv">`;
  html += `<dt>points</dt><dd>${out.n}</dd>`;
  html += `<dt>diameter</dt><dd>${num(out.diameter)}</dd>`;
  if (out.delta) {
    html += `<dt>delta (genericity margin)</dt><dd>${num(out.delta.value)}</dd>`;
    html += `<dt>witness</dt><dd><code>${esc(JSON.stringify(out.delta.witness))}</code></dd>`;
    html += `<dt>generic</dt><dd>${out.generic ? '<span class="pass">yes</span>' : '<span class="fail">no</span>'}</dd>`;
  } else {
    html += `<dt>delta</dt><dd class="hint">undefined for a single point</dd>`;
  }
  html += `</dl>`;
  if (out.nu) {
    html += `<p class="hint">nu vector — sorted half-distances, labeled with the producing pair:</p>`;
    html += nuLine(out.nu);
  }
  show("out-analyze", html);
}

function runDistance() {
  const out = JSON.parse(distance($("input-x").value, $("input-y").value));
  if (out.error) return show("out-distance", `<h2>Distance</h2><p class="error">${esc(out.error)}</p>`);
  let html = `<h2>Distance X &harr; Y</h2><dl class="kv">`;
  html += `<dt>d_GH (exact)</dt><dd>${num(out.distance)}</dd>`;
  html += `<dt>minimum distortion</dt><dd>${num(out.distortion)}</dd>`;
  html += `<dt>diameter upper bound</dt><dd>${num(out.upper_bound)}</dd>`;
  html += `<dt>witness-search nodes</dt><dd>${out.nodes}</dd>`;
  html += `</dl>`;
  html += `<p class="hint">lexicographically least irreducible optimal correspondence:</p>`;
  html += bipartite(out.labels_x, out.labels_y, out.optimal_pairs);
  show("out-distance", html);
}

function runEmbed() {
  const verify = $("opt-verify").checked;
  const out = JSON.parse(embed_space($("input-x").value, verify));
  if (out.error) return show("out-embed", `<h2>Embed X</h2><p class="error">${esc(out.error)}</p>`);
  let html = `<h2>Embed X into ${out.images.length > 1 ? "pairwise-exact " : ""}${out.k}-point spaces</h2>`;
  html += `<dl class="kv">`;
  html += `<dt>k</dt><dd>${out.k}</dd>`;
  html += `<dt>anchor margin delta/6</dt><dd>${num(out.anchor_margin)}</dd>`;
  if (out.padded) html += `<dt>padded to</dt><dd>${out.padded.labels.length} points (new distances = diameter)</dd>`;
  html += `</dl>`;
  html += `<div class="images"><div><p class="hint">anchor</p>${matrixTable(out.anchor)}</div>`;
  out.images.forEach((image, i) => {
    html += `<div><p class="hint">image of point ${i + 1}</p>${matrixTable(image)}</div>`;
  });
  html += `</div>`;
  if (out.verify) {
    const mark = out.verify.all_pass ? '<span class="pass">all distances reproduced exactly</span>'
                                     : '<span class="fail">MISMATCH FOUND</span>';
    html += `<p>solver certification: ${mark}</p>`;
    if (out.verify.pairs.length) {
      html += '<table class="matrix"><tr><th>pair</th><th>expected</th><th>computed</th><th></th></tr>';
      for (const p of out.verify.pairs) {
        html += `<tr><td>(${p.i + 1}, ${p.j + 1})</td><td>${esc(p.expected.exact)}</td>` +
                `<td>${esc(p.computed.exact)}</td>` +
                `<td>${p.pass ? '<span class="pass">=</span>' : '<span class="fail">≠</span>'}</td></tr>`;
      }
      html += "</table>";
    }
  }
  show("out-embed", html);
}

async function main() {
  await init();
  setupPresets();
  $("btn-analyze").addEventListener("click", runAnalyze);
  $("btn-distance").addEventListener("click", runDistance);
  $("btn-embed").addEventListener("click", runEmbed);
  runAnalyze();
}

main();
