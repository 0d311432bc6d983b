// Build-time configuration. The default empty base means "same origin",
// which is what `persuade serve` uses when it hosts dist/ itself. Point it
// elsewhere (e.g. "http://localhost:8087") when the UI is served separately.
export const API_BASE = "";
