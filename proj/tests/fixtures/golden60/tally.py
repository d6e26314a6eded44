#!/usr/bin/env python3
# Hand tally of the golden-60 labels. Rewrites the frozen expectation files
# next to this script; it never looks at tool output.
import json
import os
from collections import Counter, defaultdict

HERE = os.path.dirname(os.path.abspath(__file__))
CATS = ["Conditional", "ConfigurationData", "Dependency", "Documentation",
        "Idempotency", "Security", "Service", "Syntax"]
SUBS = {"ConfigurationData": ["Cache", "Credential", "FileSystem", "Network", "Storage"],
        "Service": ["Resource", "Panic"]}
DISPLAY = {c: ("Configuration Data" if c == "ConfigurationData" else c) for c in CATS}
# Six deliberate mistakes applied to the hand labels.
PERTURB = {
    "g03": [],
    "g12": ["Documentation"],
    "g06": ["ConfigurationData"],
    "g24": ["Service", "Dependency"],
    "g29": ["ConfigurationData"],
    "g30": [],
}

doc = json.load(open(os.path.join(HERE, "cases.json")))
cases = doc["cases"]


def parents(labels):
    return {l.split("/")[0] for l in labels}


def f2(x):
    return "%.2f" % x


def write(name, text):
    with open(os.path.join(HERE, name), "w", newline="\n") as fh:
        fh.write(text)


# Corpus as the miner sees it: a label-free scaffold commit plus the cases.
commits = [{"key": "scaffold", "year": int(doc["scaffold"]["date"][:4]), "labels": set(),
            "parents": set(), "files": {c["file"] for c in cases}}]
for c in cases:
    commits.append({"key": c["key"], "year": int(c["date"][:4]), "labels": set(c["labels"]),
                    "parents": parents(c["labels"]), "files": {c["file"]}})
programs = {c["file"] for c in cases}
n = len(commits)

rows = ["category,defect_proportion,script_proportion"]
for cat in CATS:
    hit = [k for k in commits if cat in k["parents"]]
    files = set().union(*[k["files"] for k in hit]) if hit else set()
    rows.append(f"{DISPLAY[cat]},{f2(100.0 * len(hit) / n)},{f2(100.0 * len(files) / len(programs))}")
labelled = [k for k in commits if k["parents"]]
files = set().union(*[k["files"] for k in labelled])
rows.append(f"Total,{f2(100.0 * len(labelled) / n)},{f2(100.0 * len(files) / len(programs))}")
write("proportions.expected.csv", "\n".join(rows) + "\n")

years = range(min(k["year"] for k in commits), max(k["year"] for k in commits) + 1)
rows = ["category,year,count"]
for cat in CATS:
    per = Counter(k["year"] for k in commits if cat in k["parents"])
    if per:
        rows += [f"{DISPLAY[cat]},{y},{per[y]}" for y in years]
write("defects_per_year.expected.csv", "\n".join(rows) + "\n")

sizes = Counter(len(k["parents"]) for k in commits)
rows = ["label_count,percentage"] + [f"{s},{f2(100.0 * sizes[s] / n)}" for s in sorted(sizes)]
write("colabel.expected.csv", "\n".join(rows) + "\n")

rows = ["category,subcategory,percentage"]
for parent in ["ConfigurationData", "Service"]:
    members = [k for k in commits if parent in k["parents"]]
    if not members:
        continue
    for sub in SUBS[parent]:
        hits = sum(1 for k in members if f"{parent}/{sub}" in k["labels"])
        rows.append(f"{DISPLAY[parent]},{sub},{f2(100.0 * hits / len(members))}")
write("subcategories.expected.csv", "\n".join(rows) + "\n")

# Oracle keyed by case, and the perturbed predictions.
write("golden.oracle", "".join(f"{c['key']},{';'.join(c['labels'])}\n" for c in cases))
pred = {c["key"]: parents(c["labels"]) for c in cases}
for key, labels in PERTURB.items():
    assert pred[key] != set(labels), key
    pred[key] = set(labels)
write("perturbed.predictions", "".join(f"{c['key']},{';'.join(sorted(pred[c['key']]))}\n" for c in cases))

DASH = "—"
truth = {c["key"]: parents(c["labels"]) for c in cases}
table = []
for name, has in [(DISPLAY[c], (lambda s, c=c: c in s)) for c in CATS] + [("No Defect", lambda s: not s)]:
    tp = sum(1 for k in truth if has(truth[k]) and has(pred[k]))
    fp = sum(1 for k in truth if not has(truth[k]) and has(pred[k]))
    fn = sum(1 for k in truth if has(truth[k]) and not has(pred[k]))
    p = tp / (tp + fp) if tp + fp else None
    r = tp / (tp + fn) if tp + fn else None
    table.append((name, tp + fn, tp, fp, fn, p, r))
ps = [p for (_, sup, _, _, _, p, _) in table if sup and p is not None]
rs = [r for (_, sup, _, _, _, _, r) in table if sup and r is not None]
fmt = lambda v: DASH if v is None else f2(v)
rows = ["Category,Occur.,Precision,Recall"]
rows += [f"{name},{sup},{fmt(p)},{fmt(r)}" for (name, sup, _, _, _, p, r) in table]
rows.append(f"Average,,{fmt(sum(ps) / len(ps) if ps else None)},{fmt(sum(rs) / len(rs) if rs else None)}")
write("perturbed.evaluation.expected.csv", "\n".join(rows) + "\n")
rows = ["category,tp,fp,fn"] + [f"{name},{tp},{fp},{fn}" for (name, _, tp, fp, fn, _, _) in table]
write("perturbed.confusion.expected.csv", "\n".join(rows) + "\n")
