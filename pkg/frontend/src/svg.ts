import type { Band } from './aggregate.js'

export interface Curve {
  label: string
  color: string
  band: Band
  showBand: boolean
}

export interface ChartSpec {
  xLabel: string
  yLabel: string
  curves: Curve[]
  width?: number
  height?: number
}

const MARGIN = { top: 24, right: 28, bottom: 56, left: 76 }

const esc = (s: string): string =>
  s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')

const fmtX = (v: number): string => {
  if (v === 0) return '0'
  const abs = Math.abs(v)
  if (abs >= 1e6 || abs < 1e-3) return v.toExponential(1)
  if (abs >= 1000) return `${Number((v / 1000).toPrecision(3))}k`
  return String(Number(v.toPrecision(3)))
}

/** Multi-series line chart with a log10 y axis, min-max bands, axis titles
 * and a legend, as standalone SVG text. */
export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 820
  const height = spec.height ?? 520
  const plotW = width - MARGIN.left - MARGIN.right
  const plotH = height - MARGIN.top - MARGIN.bottom

  const xs = spec.curves.flatMap((c) => c.band.fev)
  const ys = spec.curves.flatMap((c) => [...c.band.lo, ...c.band.hi])
  const x0 = Math.min(...xs)
  const x1 = Math.max(...xs)
  const ly0 = Math.floor(Math.log10(Math.min(...ys)))
  const ly1 = Math.ceil(Math.log10(Math.max(...ys)))
  const xSpan = x1 > x0 ? x1 - x0 : 1
  const lySpan = ly1 > ly0 ? ly1 - ly0 : 1

  const sx = (v: number): number => MARGIN.left + ((v - x0) / xSpan) * plotW
  const sy = (v: number): number =>
    MARGIN.top + plotH - ((Math.log10(v) - ly0) / lySpan) * plotH

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="13">`)
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`)

  // gridlines and y ticks at integer powers of ten
  for (let e = ly0; e <= ly1; e++) {
    const y = sy(10 ** e)
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${width - MARGIN.right}" ` +
      `y2="${y}" stroke="#dddddd" stroke-width="1"/>`)
    parts.push(`<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end">` +
      `1e${e}</text>`)
  }
  // x ticks
  for (let i = 0; i <= 5; i++) {
    const v = x0 + (xSpan * i) / 5
    const x = sx(v)
    parts.push(`<line x1="${x}" y1="${MARGIN.top + plotH}" x2="${x}" ` +
      `y2="${MARGIN.top + plotH + 5}" stroke="#444444"/>`)
    parts.push(`<text x="${x}" y="${MARGIN.top + plotH + 20}" ` +
      `text-anchor="middle">${fmtX(v)}</text>`)
  }
  // axes
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
    `y2="${MARGIN.top + plotH}" stroke="#444444"/>`)
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top + plotH}" ` +
    `x2="${width - MARGIN.right}" y2="${MARGIN.top + plotH}" stroke="#444444"/>`)
  // axis titles
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" ` +
    `text-anchor="middle">${esc(spec.xLabel)}</text>`)
  parts.push(`<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`)

  for (const curve of spec.curves) {
    const b = curve.band
    if (curve.showBand) {
      const upper = b.fev.map((x, i) => `${sx(x)},${sy(b.hi[i])}`)
      const lower = [...b.fev.keys()].reverse().map((i) => `${sx(b.fev[i])},${sy(b.lo[i])}`)
      parts.push(`<polygon points="${upper.concat(lower).join(' ')}" ` +
        `fill="${curve.color}" fill-opacity="0.15" stroke="none"/>`)
    }
    const line = b.fev.map((x, i) => `${sx(x)},${sy(b.median[i])}`).join(' ')
    parts.push(`<polyline points="${line}" fill="none" stroke="${curve.color}" ` +
      `stroke-width="2"/>`)
  }

  // legend, top right
  spec.curves.forEach((curve, i) => {
    const y = MARGIN.top + 10 + i * 20
    const x = width - MARGIN.right - 150
    parts.push(`<line x1="${x}" y1="${y}" x2="${x + 26}" y2="${y}" ` +
      `stroke="${curve.color}" stroke-width="2"/>`)
    parts.push(`<text x="${x + 32}" y="${y + 4}">${esc(curve.label)}</text>`)
  })

  parts.push('</svg>')
  return parts.join('\n')
}
