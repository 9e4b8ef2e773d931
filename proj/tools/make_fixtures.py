#!/usr/bin/env python3
# Copyright 2026 The IRAC-KG Authors.
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
"""Regenerates the prompt goldens and the replay store for the FIXTURE corpus.

Written independently of the C++ renderer and cache: plain str.replace on the
template files, hand-listed fact/rule sets per issue, and the request digest
computed from Python's own JSON encoder. The C++ tests then check that the
library reproduces these bytes and keys.

    python3 tools/make_fixtures.py
"""

import hashlib
import json
import pathlib
import re
import shutil

ROOT = pathlib.Path(__file__).resolve().parent.parent
PROMPTS = ROOT / "assets" / "prompts"
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN = ROOT / "tests" / "golden"
REPLAY = FIXTURES / "replay"

MODEL = "claude-3-5-sonnet"
KG_MAX_OUTPUT = 8192
GEN_MAX_OUTPUT = 4096

# Worked out by hand from the fixture graphs:
#   facts   = targets of ARISES_FROM(issue -> fact)
#   chosen  = sources of APPLIED_TO(rule -> one of those facts)
#             plus sources of ADDRESSES(rule -> issue)
#   judged  = every other Rule of the same graph
ISSUES = {
    ("FIXTURE-A", "I1"): {"facts": ["F1", "F2"], "chosen": ["R1", "R2"], "judged": ["R3"]},
    ("FIXTURE-B", "I1"): {"facts": ["F1"], "chosen": ["R1"], "judged": ["R2", "R3"]},
    ("FIXTURE-B", "I2"): {"facts": ["F2"], "chosen": ["R2"], "judged": ["R1", "R3"]},
}


def strip_fence(text):
    m = re.search(r"```[a-zA-Z]*\n(.*?)```", text, re.S)
    return m.group(1) if m else text


def labels(case_id):
    doc = json.loads(strip_fence((FIXTURES / "completions" / f"{case_id}.kg.txt").read_text()))
    return {v["id_"]: v["label_"] for v in doc["vertices_"]}


def request_key(prompt, max_output):
    # Same field order and compact separators as the gateway's request record.
    request = {"prompt": prompt, "model_tag": MODEL, "temperature": 0.0, "max_output": max_output}
    encoded = json.dumps(request, ensure_ascii=False, separators=(",", ":"))
    return request, hashlib.sha256(encoded.encode("utf-8")).hexdigest()


def store(prompt, max_output, completion):
    request, key = request_key(prompt, max_output)
    path = REPLAY / key[:2] / f"{key}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"request": request, "response": {"text": completion, "finish_state": "complete"}}
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def main():
    kg_t = (PROMPTS / "kg_extraction.txt").read_text(encoding="utf-8")
    sft_t = (PROMPTS / "sft_generation.txt").read_text(encoding="utf-8")
    judge_t = (PROMPTS / "rule_judge.txt").read_text(encoding="utf-8")

    if REPLAY.exists():
        shutil.rmtree(REPLAY)
    GOLDEN.mkdir(parents=True, exist_ok=True)

    for case_id in ("FIXTURE-A", "FIXTURE-B"):
        opinion = (FIXTURES / "corpus" / f"{case_id}.txt").read_text(encoding="utf-8")
        prompt = kg_t.replace("{case_opinion}", opinion)
        (GOLDEN / f"{case_id}.kg_prompt.txt").write_text(prompt, encoding="utf-8")
        completion = (FIXTURES / "completions" / f"{case_id}.kg.txt").read_text(encoding="utf-8")
        store(prompt, KG_MAX_OUTPUT, completion)

    for (case_id, issue), sets in ISSUES.items():
        lab = labels(case_id)
        facts = "\n".join(lab[i] for i in sets["facts"])
        chosen = "\n".join(lab[i] for i in sets["chosen"])
        judged = "\n".join(lab[i] for i in sets["judged"])

        sft = sft_t.replace("{material_facts}", facts).replace("{legal_issue}", lab[issue]).replace("{rules}", chosen)
        (GOLDEN / f"{case_id}.{issue}.sft_prompt.txt").write_text(sft, encoding="utf-8")
        completion = (FIXTURES / "completions" / f"{case_id}.{issue}.sft.txt").read_text(encoding="utf-8")
        store(sft, GEN_MAX_OUTPUT, completion)

        judge = (judge_t.replace("{case_facts}", facts).replace("{legal_issue}", lab[issue])
                 .replace("{chosen_rules}", chosen).replace("{rejected_rules}", judged))
        (GOLDEN / f"{case_id}.{issue}.judge_prompt.txt").write_text(judge, encoding="utf-8")
        completion = (FIXTURES / "completions" / f"{case_id}.{issue}.judge.txt").read_text(encoding="utf-8")
        store(judge, GEN_MAX_OUTPUT, completion)


if __name__ == "__main__":
    main()
