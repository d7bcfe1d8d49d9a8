"""Regenerates the tiny random BERT fixture and its expected outputs.

The C++ encoder is checked against the reference PyTorch implementation:
token ids from the reference WordPiece tokenizer and last hidden states from
BertModel, for a few sentence pairs and single texts.

    python3 tests/fixtures/make_tiny_bert.py
"""

import json
import pathlib

import torch
from safetensors.torch import save_file
from transformers import BertConfig, BertModel, BertTokenizer

HERE = pathlib.Path(__file__).resolve().parent / "tiny_bert"

VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list(".,;:!?'\"()-")
    + "the a of to and in that people they can do by have food water school kids money poverty "
      "plan author evidence help goals be met 2025 ##s ##ing ##ed ##ly un ##able sau ##ri kenya "
      "café cafe naive resume ##bel ##iev".split()
)

PAIRS = [
    ("", "They can do that by assuring that the people of Sauri, Kenya have food."),
    ("The kids have no money.", "The kids and their families have no money!"),
    ("The plan helps people.", ""),
    ("Café naïve résumé", "UNBELIEVABLE goals"),
]
TEXTS = ["The author helps the people of Kenya.", "", "water, food and school"]


def main():
    torch.manual_seed(20240605)
    HERE.mkdir(parents=True, exist_ok=True)
    (HERE / "vocab.txt").write_text("\n".join(VOCAB) + "\n")
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=16,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=32,
        max_position_embeddings=40,
        type_vocab_size=2,
        hidden_act="gelu",
        hidden_dropout_prob=0.0,
        attention_probs_dropout_prob=0.0,
        layer_norm_eps=1e-12,
    )
    model = BertModel(config, add_pooling_layer=False).eval()
    with torch.no_grad():
        for p in model.parameters():
            p.copy_(torch.randn_like(p) * 0.5)
    save_file({k: v.contiguous() for k, v in model.state_dict().items()}, str(HERE / "model.safetensors"))
    cfg = config.to_dict()
    cfg["do_lower_case"] = True
    (HERE / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True, default=str) + "\n")

    tok = BertTokenizer(str(HERE / "vocab.txt"), do_lower_case=True)
    cases = []

    def run(ids, segments):
        with torch.no_grad():
            out = model(
                input_ids=torch.tensor([ids]),
                token_type_ids=torch.tensor([segments]),
                attention_mask=torch.ones(1, len(ids), dtype=torch.long),
            ).last_hidden_state[0]
        return [[round(float(x), 7) for x in row] for row in out]

    for a, b in PAIRS:
        ta, tb = tok.tokenize(a), tok.tokenize(b)
        ids = [tok.cls_token_id] + tok.convert_tokens_to_ids(ta) + [tok.sep_token_id]
        ids += tok.convert_tokens_to_ids(tb) + [tok.sep_token_id]
        segments = [0] * (len(ta) + 2) + [1] * (len(tb) + 1)
        cases.append({"kind": "pair", "a": a, "b": b, "tokens_a": ta, "tokens_b": tb, "ids": ids,
                      "output": run(ids, segments)})
    for t in TEXTS:
        tt = tok.tokenize(t)
        ids = [tok.cls_token_id] + (tok.convert_tokens_to_ids(tt) + [tok.sep_token_id] if tt else [])
        cases.append({"kind": "text", "a": t, "tokens_a": tt, "ids": ids, "output": run(ids, [0] * len(ids))})
    (HERE / "expected.json").write_text(json.dumps(cases, indent=1, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
