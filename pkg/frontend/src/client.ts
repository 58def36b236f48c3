// Connects the view model to the gateway and carries operator commands.

import type { CommandMessage, CommandName } from "./protocol.js";
import { parseServerMessage } from "./protocol.js";
import type { Transport, TransportFactory } from "./transport.js";
import { ViewModel } from "./viewmodel.js";

export class PanelClient {
  private transport: Transport | null = null;

  constructor(
    readonly viewModel: ViewModel,
    private readonly factory: TransportFactory,
  ) {}

  connect(url: string): void {
    this.viewModel.markConnecting();
    this.transport = this.factory(url, {
      onOpen: () => {
        // the server speaks first (hello, then spec); nothing to send here
      },
      onMessage: (raw) => {
        const msg = parseServerMessage(raw);
        if (msg) this.viewModel.apply(msg);
      },
      onClose: () => this.viewModel.markDisconnected(),
    });
  }

  sendCommand(command: CommandName, args?: Record<string, string>): void {
    const msg: CommandMessage = args ? { type: "command", command, args }
      : { type: "command", command };
    if (!this.transport) throw new Error("not connected");
    this.transport.send(JSON.stringify(msg));
  }

  close(): void {
    this.transport?.close();
    this.transport = null;
  }
}
