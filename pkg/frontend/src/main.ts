import { mountPanel } from "./ui.js";

const mount = document.getElementById("app");
if (mount === null) {
  throw new Error("missing #app mount point");
}
const { elements } = mountPanel(document, mount, { store: window.localStorage });

const params = new URLSearchParams(window.location.search);
const host = params.get("host");
const port = params.get("port");
if (host !== null) elements.hostInput.value = host;
if (port !== null) elements.portInput.value = port;
