/** Copy text to the clipboard, preferring the async clipboard API and
 * falling back to a transient textarea + execCommand. Returns the text
 * that was handed to the clipboard so callers can verify it. */

export async function copyText(
  text: string,
  doc: Document = document,
): Promise<string> {
  const nav = doc.defaultView?.navigator;
  if (nav?.clipboard?.writeText) {
    await nav.clipboard.writeText(text);
    return text;
  }
  const area = doc.createElement("textarea");
  area.value = text;
  area.setAttribute("readonly", "");
  area.style.position = "fixed";
  area.style.left = "-10000px";
  doc.body.appendChild(area);
  try {
    area.select();
    if (typeof doc.execCommand !== "function" || !doc.execCommand("copy")) {
      throw new Error("clipboard unavailable");
    }
    return area.value;
  } finally {
    area.remove();
  }
}
