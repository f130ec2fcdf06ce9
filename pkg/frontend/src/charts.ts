// Chart rendering: maps server-computed series layers one-to-one onto SVG
// primitives. No statistical derivation happens here.

import type { Series, SeriesLayer } from './api.js'

const W = 680
const H = 420
const PAD = 48
const NS = 'http://www.w3.org/2000/svg'

const METHOD_COLORS: Record<string, string> = {
  FM: '#c0392b',
  LR: '#2471a3',
  GLM: '#1e8449',
}

function colorFor(name: string, layer: SeriesLayer): string {
  if (typeof layer.color === 'string') return layer.color
  for (const key of Object.keys(METHOD_COLORS)) {
    if (name.startsWith(key)) return METHOD_COLORS[key]
  }
  return '#223'
}

type Pt = [number, number]

function finitePoints(layer: SeriesLayer): Pt[] {
  const out: Pt[] = []
  for (const d of layer.data ?? []) {
    const [x, y] = d as [number, number]
    if (Number.isFinite(x) && Number.isFinite(y)) out.push([x, y])
  }
  return out
}

function el<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string | number>): SVGElementTagNameMap[K] {
  const node = document.createElementNS(NS, tag)
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v))
  return node
}

export function renderSeries(series: Series): SVGSVGElement {
  const pts: Pt[] = []
  for (const [name, layer] of Object.entries(series.layers)) {
    if (layer.type === 'table') continue
    if (layer.type === 'vlines') {
      for (const v of (layer.data ?? []) as number[]) pts.push([v, 0.5])
    } else {
      pts.push(...finitePoints(layer))
    }
  }
  let [x0, x1] = extent(pts.map(p => p[0]), 0, 1)
  let [y0, y1] = extent(pts.map(p => p[1]), 0, 1)
  const mx = 0.06 * (x1 - x0)
  const my = 0.06 * (y1 - y0)
  x0 -= mx; x1 += mx; y0 -= my; y1 += my
  const sx = (v: number) => PAD + ((v - x0) / (x1 - x0)) * (W - 2 * PAD)
  const sy = (v: number) => H - PAD - ((v - y0) / (y1 - y0)) * (H - 2 * PAD)

  const svg = el('svg', { width: W, height: H, viewBox: `0 0 ${W} ${H}` })
  svg.appendChild(el('rect', { width: W, height: H, fill: 'white' }))
  svg.appendChild(el('line', { x1: PAD, y1: H - PAD, x2: W - PAD, y2: H - PAD, stroke: '#000' }))
  svg.appendChild(el('line', { x1: PAD, y1: PAD, x2: PAD, y2: H - PAD, stroke: '#000' }))
  for (let i = 0; i <= 4; i++) {
    const xv = x0 + ((x1 - x0) * i) / 4
    const yv = y0 + ((y1 - y0) * i) / 4
    const tx = el('text', { x: sx(xv), y: H - PAD + 16, 'font-size': 10, 'text-anchor': 'middle' })
    tx.textContent = trim(xv)
    const ty = el('text', { x: PAD - 6, y: sy(yv) + 3, 'font-size': 10, 'text-anchor': 'end' })
    ty.textContent = trim(yv)
    svg.append(tx, ty)
  }
  const caption = el('text', { x: W / 2, y: H - 8, 'font-size': 11, 'text-anchor': 'middle' })
  caption.textContent = series.x_label
  svg.appendChild(caption)

  for (const name of Object.keys(series.layers).sort()) {
    const layer = series.layers[name]
    const color = colorFor(name, layer)
    const g = el('g', {})
    g.dataset.layer = name
    switch (layer.type) {
      case 'points':
        for (const [x, y] of finitePoints(layer)) {
          if (layer.marker === 'x') {
            g.appendChild(el('path', {
              d: `M${sx(x) - 3},${sy(y) - 3} l6,6 m0,-6 l-6,6`,
              stroke: color, 'stroke-width': 1.2, fill: 'none',
            }))
          } else if (layer.marker === '+') {
            g.appendChild(el('path', {
              d: `M${sx(x) - 4},${sy(y)} l8,0 m-4,-4 l0,8`,
              stroke: color, 'stroke-width': 1.2, fill: 'none',
            }))
          } else {
            g.appendChild(el('circle', { cx: sx(x), cy: sy(y), r: 3, fill: 'none', stroke: color }))
          }
        }
        break
      case 'curve':
      case 'steps':
      case 'polygon': {
        const coords = finitePoints(layer).map(([x, y]) => `${sx(x)},${sy(y)}`).join(' ')
        if (coords) {
          const shape = el(layer.type === 'polygon' ? 'polygon' : 'polyline', {
            points: coords, fill: 'none', stroke: color, 'stroke-width': 1.2,
          })
          if (layer.style === 'dashed') shape.setAttribute('stroke-dasharray', '6 4')
          g.appendChild(shape)
        }
        break
      }
      case 'vlines':
        for (const v of (layer.data ?? []) as number[]) {
          g.appendChild(el('line', {
            x1: sx(v), y1: PAD, x2: sx(v), y2: H - PAD,
            stroke: color, 'stroke-dasharray': '4 3',
          }))
        }
        break
      case 'abline': {
        const yl = (layer.slope ?? 0) * x0 + (layer.intercept ?? 0)
        const yr = (layer.slope ?? 0) * x1 + (layer.intercept ?? 0)
        const line = el('line', { x1: sx(x0), y1: sy(yl), x2: sx(x1), y2: sy(yr), stroke: color })
        if (layer.style === 'dashed') line.setAttribute('stroke-dasharray', '6 4')
        g.appendChild(line)
        break
      }
      case 'bar_right':
      case 'bar_edge':
        for (const [x, y] of finitePoints(layer)) {
          g.appendChild(el('line', {
            x1: sx(x) - 6, y1: sy(y), x2: sx(x) + 6, y2: sy(y),
            stroke: color, 'stroke-width': 3,
          }))
        }
        break
      case 'table':
        break
    }
    svg.appendChild(g)
  }
  return svg
}

function extent(vals: number[], lo: number, hi: number): [number, number] {
  if (!vals.length) return [lo, hi]
  let a = Math.min(...vals)
  let b = Math.max(...vals)
  if (b - a < 1e-12) { a -= 0.5; b += 0.5 }
  return [a, b]
}

function trim(v: number): string {
  const s = v.toPrecision(4)
  return s.includes('.') ? s.replace(/0+$/, '').replace(/\.$/, '') : s
}
