// Browser bootstrap: connect to the gateway and mount the panel.

import { PanelClient } from "./client.js";
import { PanelRenderer } from "./renderer.js";
import { webSocketTransport, withReconnect } from "./transport.js";
import { ViewModel } from "./viewmodel.js";

const params = new URLSearchParams(location.search);
const url = params.get("gateway") ?? `ws://${location.hostname || "127.0.0.1"}:8765/`;

const viewModel = new ViewModel();
const client = new PanelClient(viewModel, withReconnect(webSocketTransport));
new PanelRenderer(document.getElementById("panel")!, client);
client.connect(url);
