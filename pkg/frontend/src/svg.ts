/** Deterministic SVG document builder: plain string assembly, fixed
 *  attribute order, coordinates rounded to two decimals. */

export type Attrs = Record<string, string | number>;

const round = (v: number) => {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? 0 : r;
};

function formatAttrs(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? round(v) : v}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const open = `<${tag}${formatAttrs(attrs)}>`;
  if (children.length === 0) return `${open.slice(0, -1)}/>`;
  return `${open}${children.join("")}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${formatAttrs(attrs)}>${escapeText(content)}</text>`;
}

export function escapeText(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function polylinePoints(pts: Array<[number, number]>): string {
  return pts.map(([x, y]) => `${round(x)},${round(y)}`).join(" ");
}

export function pathOf(pts: Array<[number, number]>, close = false): string {
  const parts = pts.map(
    ([x, y], i) => `${i === 0 ? "M" : "L"}${round(x)},${round(y)}`,
  );
  return parts.join("") + (close ? "Z" : "");
}

export function document(
  width: number,
  height: number,
  children: string[],
): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="Helvetica, Arial, sans-serif">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    children.join("") +
    `</svg>`
  );
}
