import { GatewayClient } from "./api.js";
import { App } from "./app.js";
import { EventSocket } from "./events.js";

const root = document.getElementById("app");
if (root) {
  const wsUrl = window.location.origin.replace(/^http/, "ws") + "/api/events";
  const app = new App(root, new GatewayClient(""), new EventSocket(wsUrl));
  void app.start();
}
