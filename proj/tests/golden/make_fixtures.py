#!/usr/bin/env python3
"""Regenerates the golden fixture directory.

Usage: mwv queries --input claims.tsv | python3 make_fixtures.py fixtures/

Titles are synthetic but shaped like search results: debunking headlines for fake
claims, confirming ones for real claims, plus off-topic results the relevance gate
should drop. Output is deterministic.
"""
import csv
import json
import random
import sys
from pathlib import Path

FETCHED_AT = "2021-01-15T12:00:00Z"

DEBUNK = [
    "fact check: {a} {b} claim is false",
    "no, {a} does not {b}",
    "{a} {b}? experts debunk viral hoax",
    "misleading post claims {a} {b}",
    "the truth about {a} and {b}",
    "{a} {b} rumor debunked by doctors",
    "viral message on {a} {b} is fake news",
    "is it true that {a} {b}?",
    "{a} {b}: a dangerous myth",
    "false claim links {a} to {b}",
]
CONFIRM = [
    "study confirms {a} {b}",
    "{a} {b}: what the evidence shows",
    "health officials explain {a} {b}",
    "new data on {a} and {b}",
    "how {a} affects {b}, according to scientists",
    "{a} {b} explained",
    "researchers report {a} {b}",
    "guidance update: {a} {b}",
    "q&a: {a} and {b}",
    "why {a} matters for {b}",
]
# Templates whose keyword phrases always contain a corpus entry.
DEBUNK_FLAGGED = [t for t in DEBUNK if not t.startswith(("no, ", "the truth"))]
OFF_TOPIC = [
    "stock markets rally after holiday",
    "weather forecast for the weekend",
    "top ten travel destinations this year",
    "local team wins championship final",
    "recipe: easy weeknight dinner ideas",
]

# Claims with unusual evidence.
ALL_DEBUNK_GOOGLE = {"g01"}          # every google title carries a corpus phrase
EMPTY = {("g12", "youtube"), ("g10", "google"), ("g10", "youtube")}
SHORT = {("g20", "google"): 3, ("g07", "youtube"): 5}


def titles_for(claim_id, label, platform, content, rng):
    words = content.split()
    n = SHORT.get((claim_id, platform), 10)
    pool = DEBUNK if label == "fake" else CONFIRM
    out = []
    for rank in range(1, n + 1):
        a, b = rng.sample(words, 2) if len(words) >= 2 else (words[0], words[0])
        if claim_id in ALL_DEBUNK_GOOGLE and platform == "google":
            template = DEBUNK_FLAGGED[(rank - 1) % len(DEBUNK_FLAGGED)]
        elif rng.random() < 0.2:
            out.append(rng.choice(OFF_TOPIC))
            continue
        elif rng.random() < 0.15:
            # The other side shows up too.
            template = rng.choice(CONFIRM if label == "fake" else DEBUNK)
        else:
            template = rng.choice(pool)
        out.append(template.format(a=a, b=b))
    return out


def main():
    out_dir = Path(sys.argv[1])
    claims_file = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(__file__).with_name("claims.tsv")
    with claims_file.open(newline="") as f:
        labels = {row["id"]: row["label"] for row in csv.DictReader(f, delimiter="\t")}
    out_dir.mkdir(parents=True, exist_ok=True)
    for line in sys.stdin:
        q = json.loads(line)
        cid = q["claim_id"]
        rng = random.Random(cid)
        for platform in ("google", "youtube"):
            path = out_dir / q["fixtures"][platform]
            if (cid, platform) in EMPTY:
                path.write_text("")
                continue
            lines = []
            for rank, title in enumerate(titles_for(cid, labels[cid], platform, q["content"], rng), start=1):
                host = "www.youtube.com/watch?v=" if platform == "youtube" else "news.example.org/"
                lines.append(json.dumps({
                    "query": q["query"],
                    "platform": platform,
                    "rank": rank,
                    "title": title,
                    "url": "https://%s%s%02d%s" % (host, cid, rank, platform[0]),
                    "fetched_at": FETCHED_AT,
                }, separators=(",", ":")))
            path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
