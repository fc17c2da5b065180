#!/usr/bin/env python3
"""Tiny completion endpoint for offline demos and manual testing.

Serves POST /v1/completions with the {prompt, max_tokens, temperature, stop}
request body and a {text, finish_reason, usage.completion_tokens} response.
Replies follow the reasoning-trace format (<think> body, </think> delimiter,
<answer> block) so the full loop can be driven without a real model. The
canned answer is a 0..999 counter, so only benchmarks containing that problem
will pass; everything else exercises the failure and retry paths.
"""

import argparse
import json
from http.server import BaseHTTPRequestHandler, HTTPServer

# ternary phrasing: functionally the 0..999 counter, but lexically far from
# the benchmark golden so the contamination re-check keeps the triples
COUNTER = """module top_module(
    input clk,
    input reset,
    output reg [9:0] q);

    wire wrap_now = (q == 10'd999);

    always @(posedge clk)
        q <= reset ? 10'd0 : (wrap_now ? 10'd0 : q + 10'd1);

endmodule"""


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length) or b"{}")
        prompt = body.get("prompt", "")

        if "create a high-quality Verilog problem" in prompt:
            # specification-generation step
            text = ("<PROBLEM>\nBuild a counter that counts from 0 to 999, inclusive, with "
                    "a period of 1000 cycles.\nThe reset input is active high synchronous, "
                    "and should reset the counter to 0.\n</PROBLEM>")
        elif "solve a Verilog problem by completing one Verilog module" in prompt:
            # solution-generation step: both reasoning tags, answer block
            text = ("<think>\nA ten-bit register that wraps after 999. Wait, verify the "
                    "synchronous reset.\n</think>\n<answer>\n%s\n</answer>" % COUNTER)
        elif prompt.rstrip().endswith("</think>"):
            # forced answer after a truncated trace
            text = "\n<answer>\n%s\n</answer>" % COUNTER
        elif "Wait, my reasoning must be incorrect." in prompt:
            text = (" re-reading the timing constraints once more.</think>\n"
                    "<answer>\n%s\n</answer>" % COUNTER)
        else:
            text = (" plan: a ten-bit register wrapping at 999. Wait, check the reset "
                    "polarity. Wait, confirm the wrap comparison.</think>\n"
                    "<answer>\n%s\n</answer>" % COUNTER)

        reply = {
            "text": text,
            "finish_reason": "stop",
            "usage": {"completion_tokens": max(1, len(text) // 4)},
        }
        data = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, fmt, *args):
        pass


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8707)
    args = parser.parse_args()
    server = HTTPServer(("127.0.0.1", args.port), Handler)
    print(f"mock endpoint on http://127.0.0.1:{args.port}/v1/completions")
    server.serve_forever()


if __name__ == "__main__":
    main()
