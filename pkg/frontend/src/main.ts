import { SpiderApi } from "./api.js";
import { App, sessionIdFromHash } from "./app.js";

const mount = document.getElementById("app");
if (!mount) throw new Error("missing #app mount point");
const app = new App(mount, new SpiderApi(""));
app.start(sessionIdFromHash(location.hash));
