# Copyright 2026 The eposim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled workload files from public model topologies.

Padding is folded into in_h/in_w. Where a strided window would leave a
remainder, the trailing rows/columns that floor-mode convolution never
reads are dropped so (in_h - kernel_h) is a multiple of the stride.
"""

import argparse
import json
import pathlib


def conv(name, in_ch, out_ch, k, stride, in_hw, pad, ops=()):
    span = in_hw + 2 * pad - k
    eff = in_hw + 2 * pad - span % stride
    return {
        "kind": "conv2d",
        "name": name,
        "dims": {"in_ch": in_ch, "out_ch": out_ch, "kernel_h": k, "kernel_w": k,
                 "stride": stride, "in_h": eff, "in_w": eff},
        "nongemm": [{"tag": t, "elems": e} for t, e in ops],
        "batch": 1,
    }


def out_hw(in_hw, k, stride, pad):
    return (in_hw + 2 * pad - k) // stride + 1


def block(name, ops):
    return {"kind": "elementwise_block", "name": name, "dims": {},
            "nongemm": [{"tag": t, "elems": e} for t, e in ops], "batch": 1}


def dense(name, fin, fout, ops=()):
    return {"kind": "dense", "name": name, "dims": {"in_features": fin, "out_features": fout},
            "nongemm": [{"tag": t, "elems": e} for t, e in ops], "batch": 1}


def proj(name, d_model, d_proj, seq, ops=()):
    return {"kind": "attention_proj", "name": name,
            "dims": {"d_model": d_model, "d_proj": d_proj, "seq_len": seq},
            "nongemm": [{"tag": t, "elems": e} for t, e in ops], "batch": 1}


def lstm(name, inp, hidden, seq):
    return {"kind": "lstm_cell", "name": name,
            "dims": {"hidden": hidden, "input": inp, "seq_len": seq}, "nongemm": [], "batch": 1}


def resnet50():
    layers = []
    hw = 224
    layers.append(conv("conv1", 3, 64, 7, 2, hw, 3))
    hw = out_hw(hw, 7, 2, 3)
    layers[-1]["nongemm"] = [{"tag": "relu", "elems": 64 * hw * hw}]
    layers.append(block("pool1", [("maxpool", 64 * hw * hw)]))
    hw = out_hw(hw, 3, 2, 1)
    in_ch = 64
    for stage, (width, blocks) in enumerate([(64, 3), (128, 4), (256, 6), (512, 3)], start=2):
        for b in range(blocks):
            stride = 2 if (b == 0 and stage > 2) else 1
            p = f"res{stage}.{b}"
            out_ch = 4 * width
            layers.append(conv(p + ".a", in_ch, width, 1, 1, hw, 0, [("relu", width * hw * hw)]))
            o = out_hw(hw, 3, stride, 1)
            layers.append(conv(p + ".b", width, width, 3, stride, hw, 1, [("relu", width * o * o)]))
            layers.append(conv(p + ".c", width, out_ch, 1, 1, o, 0))
            if b == 0:
                layers.append(conv(p + ".down", in_ch, out_ch, 1, stride, hw, 0))
            layers.append(block(p + ".sum", [("add", out_ch * o * o), ("relu", out_ch * o * o)]))
            in_ch, hw = out_ch, o
    layers.append(block("avgpool", [("avgpool", in_ch * hw * hw)]))
    layers.append(dense("fc", in_ch, 1000, [("softmax", 1000)]))
    return {"name": "resnet50", "layers": layers}


def bertlarge(n_layers=24, d=1024, heads=16, seq=384, ffn=4096):
    dh = d // heads
    layers = []
    for i in range(n_layers):
        p = f"enc{i}"
        for w in "qkv":
            layers.append(proj(f"{p}.{w}", d, d, seq))
        for h in range(heads):
            layers.append(proj(f"{p}.score{h}", dh, seq, seq, [("softmax", seq * seq)]))
        for h in range(heads):
            layers.append(proj(f"{p}.context{h}", seq, dh, seq))
        layers.append(proj(f"{p}.out", d, d, seq, [("add", seq * d), ("layernorm", seq * d)]))
        layers.append(proj(f"{p}.ffn1", d, ffn, seq, [("gelu", seq * ffn)]))
        layers.append(proj(f"{p}.ffn2", ffn, d, seq, [("add", seq * d), ("layernorm", seq * d)]))
    return {"name": "bertlarge", "layers": layers}


def rnnt(frames=200, symbols=100, hidden=1024, pred=320, joint=512, vocab=29):
    stacked = frames // 2
    layers = [
        lstm("enc.pre0", 240, hidden, frames),
        lstm("enc.pre1", hidden, hidden, frames),
        lstm("enc.post0", 2 * hidden, hidden, stacked),
        lstm("enc.post1", hidden, hidden, stacked),
        lstm("enc.post2", hidden, hidden, stacked),
        lstm("pred.0", pred, pred, symbols),
        lstm("pred.1", pred, pred, symbols),
        proj("joint.enc", hidden, joint, stacked),
        proj("joint.pred", pred, joint, symbols),
    ]
    steps = stacked + symbols
    layers.append(proj("joint.hidden", joint, joint, steps, [("add", joint * steps), ("relu", joint * steps)]))
    layers.append(proj("joint.out", joint, vocab, steps, [("softmax", vocab * steps)]))
    return {"name": "rnnt", "layers": layers}


def license_header():
    """This file's own license block, re-commented for the JSON-with-comments format."""
    lines = pathlib.Path(__file__).read_text().splitlines()
    block = [l for l in lines[: lines.index("")] if l.startswith("#")]
    return "".join("//" + l[1:] + "\n" for l in block) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "workloads"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for model in (resnet50(), bertlarge(), rnnt()):
        (out / f"{model['name']}.workload").write_text(license_header() + json.dumps(model, indent=1) + "\n")


if __name__ == "__main__":
    main()
