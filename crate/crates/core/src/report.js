(function () {
  "use strict";
  var SVG_NS = "http://www.w3.org/2000/svg";
  var WIDTH = 960, HEIGHT = 420, NODE_W = 14, PAD = 18, MARGIN = 10;
  var COLORS = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];

  function el(name, attrs, parent) {
    var e = document.createElementNS(SVG_NS, name);
    for (var k in attrs) { e.setAttribute(k, attrs[k]); }
    if (parent) { parent.appendChild(e); }
    return e;
  }

  // Longest-path layering; edges that close a cycle are ignored.
  function layers(graph) {
    var n = graph.nodes.length, layer = new Array(n).fill(0);
    for (var pass = 0; pass < n; pass++) {
      var changed = false;
      graph.links.forEach(function (l) {
        if (layer[l.target] < layer[l.source] + 1 && layer[l.source] + 1 < n) {
          layer[l.target] = layer[l.source] + 1;
          changed = true;
        }
      });
      if (!changed) { break; }
    }
    return layer;
  }

  function draw(svg, graph) {
    var n = graph.nodes.length;
    var layer = layers(graph);
    var depth = Math.max.apply(null, layer) + 1;
    var inSum = new Array(n).fill(0), outSum = new Array(n).fill(0);
    graph.links.forEach(function (l) { outSum[l.source] += l.value; inSum[l.target] += l.value; });
    var size = inSum.map(function (v, i) { return Math.max(v, outSum[i]); });

    var columns = [];
    for (var c = 0; c < depth; c++) { columns.push([]); }
    for (var i = 0; i < n; i++) { columns[layer[i]].push(i); }

    var scale = Infinity;
    columns.forEach(function (col) {
      var total = col.reduce(function (s, i) { return s + size[i]; }, 0);
      var room = HEIGHT - 2 * MARGIN - PAD * (col.length - 1);
      if (total > 0) { scale = Math.min(scale, room / total); }
    });
    if (!isFinite(scale)) { scale = 1; }

    var x = new Array(n), y = new Array(n), h = new Array(n);
    var step = depth > 1 ? (WIDTH - 2 * MARGIN - NODE_W - 160) / (depth - 1) : 0;
    columns.forEach(function (col, c) {
      var cy = MARGIN;
      col.forEach(function (i) {
        x[i] = MARGIN + c * step;
        y[i] = cy;
        h[i] = Math.max(2, size[i] * scale);
        cy += h[i] + PAD;
      });
    });

    var outOffset = new Array(n).fill(0), inOffset = new Array(n).fill(0);
    graph.links.forEach(function (l) {
      var w = Math.max(1, l.value * scale);
      var sx = x[l.source] + NODE_W, sy = y[l.source] + outOffset[l.source] + w / 2;
      var tx = x[l.target], ty = y[l.target] + inOffset[l.target] + w / 2;
      outOffset[l.source] += w;
      inOffset[l.target] += w;
      var mx = (sx + tx) / 2;
      var path = el("path", {
        d: "M" + sx + "," + sy + " C" + mx + "," + sy + " " + mx + "," + ty + " " + tx + "," + ty,
        fill: "none",
        stroke: COLORS[l.source % COLORS.length],
        "stroke-opacity": 0.45,
        "stroke-width": w
      }, svg);
      el("title", {}, path).textContent =
        graph.nodes[l.source].name + " → " + graph.nodes[l.target].name + ": " + l.value;
    });

    for (var k = 0; k < n; k++) {
      el("rect", {
        x: x[k], y: y[k], width: NODE_W, height: h[k],
        fill: COLORS[k % COLORS.length]
      }, svg);
      el("text", { x: x[k] + NODE_W + 4, y: y[k] + h[k] / 2, dy: "0.35em" }, svg)
        .textContent = graph.nodes[k].name;
    }
  }

  var svgs = document.querySelectorAll("svg.sankey");
  for (var s = 0; s < svgs.length; s++) {
    var data = document.getElementById(svgs[s].getAttribute("data-graph"));
    if (data) { draw(svgs[s], JSON.parse(data.textContent)); }
  }
})();
