#!/usr/bin/env python3
"""Regenerate the committed demo corpus under demo/.

Everything is synthetic and seeded, so re-running this script reproduces the
same files byte for byte. The corpus is sized to exercise every pipeline
step in a couple of seconds:

  - ai4privacy.jsonl      600 BIO records, person/contact/location flavour,
                          with exactly 3 BLOOD_TYPE mentions planted so the
                          rare-label filter (threshold 5) has work to do
  - gretel_finance.jsonl  250 BIO records, financial flavour, capped at 200
                          by the demo config
  - nemotron.xml          150 inline-tagged text lines, 15 of them span-free
                          (those get dropped at ingest), rebalanced down to
                          10 percent of the corpus by the demo config
"""

from __future__ import annotations

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "demo"

FIRST = ["Ana", "Marcus", "Yuki", "Priya", "Tomas", "Leila", "Owen", "Greta",
         "Dmitri", "Sofia", "Henrik", "Amara"]
LAST = ["Silva", "Okafor", "Lindqvist", "Tanaka", "Moreau", "Novak", "Reyes",
        "Haddad", "Kovacs", "Byrne"]
CITIES = ["Lisbon", "Osaka", "Tallinn", "Porto", "Bergen", "Gdansk", "Leeds",
          "Turin", "Graz"]
COUNTRIES = ["Portugal", "Japan", "Estonia", "Norway", "Poland", "Austria"]
STREETS = ["14 Alder Row", "9 Quay Lane", "221 Finch Road", "3 Mill Court",
           "78 Harbour Walk"]
JOBS = ["auditor", "paralegal", "dispatcher", "radiologist", "surveyor",
        "archivist"]
COMPANIES = ["Vantor Logistics", "Briar Mutual", "Kestrel Labs", "Oulo Freight"]
DOMAINS = ["metro-mail.example", "postbox.example", "relay.example"]
MONTHS = ["January", "February", "March", "April", "May", "June", "July",
          "August", "September", "October", "November", "December"]
BANKS = ["Meridian Savings", "Crestline Bank", "Harbour Trust"]
CURRENCIES = ["EUR", "USD", "NOK", "PLN"]
BLOOD = ["O-negative", "AB-positive", "B-negative"]


def phone(rng: random.Random) -> str:
    return f"+{rng.randint(30, 49)} {rng.randint(600, 799)} {rng.randint(100, 999)} {rng.randint(100, 999)}"


def iban(rng: random.Random) -> str:
    return f"PT{rng.randint(10, 99)} {rng.randint(1000, 9999)} {rng.randint(1000, 9999)} {rng.randint(10000, 99999)}"


def account(rng: random.Random) -> str:
    return str(rng.randint(10_000_000, 99_999_999))


def amount(rng: random.Random) -> str:
    return f"{rng.randint(20, 9500)}.{rng.randint(0, 99):02d}"


def ssn(rng: random.Random) -> str:
    return f"{rng.randint(100, 899)}-{rng.randint(10, 99)}-{rng.randint(1000, 9999)}"


def ip(rng: random.Random) -> str:
    return f"{rng.randint(10, 223)}.{rng.randint(0, 255)}.{rng.randint(0, 255)}.{rng.randint(1, 254)}"


def date(rng: random.Random) -> str:
    return f"{rng.choice(MONTHS)} {rng.randint(1, 28)}, {rng.randint(2018, 2024)}"


# Each template is a list of (text, type-or-None) pieces. Text pieces are
# whitespace-tokenised as-is; typed pieces become one BIO span.

def _privacy_templates(rng: random.Random):
    first, last = rng.choice(FIRST), rng.choice(LAST)
    full = f"{first} {last}"
    return [
        [("Contact", None), (full, "NAME"), ("at", None),
         (f"{first.lower()}.{last.lower()}@{rng.choice(DOMAINS)}", "EMAIL"),
         ("or call", None), (phone(rng), "PHONE_NUMBER"), ("before Friday .", None)],
        [(full, "PERSON"), ("works as a", None), (rng.choice(JOBS), "JOB"),
         ("for", None), (rng.choice(COMPANIES), "COMPANY_NAME"),
         ("in", None), (rng.choice(CITIES), "CITY"), (".", None)],
        [("Ship the parcel to", None), (rng.choice(STREETS), "STREET_ADDRESS"),
         (",", None), (rng.choice(CITIES), "CITY"), (",", None),
         (rng.choice(COUNTRIES), "COUNTRY"), ("by", None), (date(rng), "DATE"),
         (".", None)],
        [("User", None), (f"{first.lower()}{rng.randint(10, 97)}", "USERNAME"),
         ("logged in from", None), (ip(rng), "IP_ADDRESS"), ("on", None),
         (date(rng), "DATE_TIME"), (".", None)],
        [("Applicant", None), (first, "FIRST_NAME"), (last, "LAST_NAME"),
         (", age", None), (str(rng.randint(19, 78)), "AGE"),
         (", holds passport", None),
         (f"P{rng.randint(1000000, 9999999)}", "PASSPORT_NUMBER"), (".", None)],
        [("Reset the password", None),
         (f"tmp-{rng.randint(100, 999)}-{rng.choice(['kite', 'lamp', 'pine'])}", "PASSWORD"),
         ("for", None), (full, "NAME"), ("and confirm via", None),
         (f"{first.lower()}_{last.lower()}@{rng.choice(DOMAINS)}", "EMAIL"),
         (".", None)],
        [("SSN", None), (ssn(rng), "SSN"), ("on file for", None),
         (full, "PERSON"), (", born", None), (date(rng), "DATE_OF_BIRTH"),
         (".", None)],
    ]


def _blood_template(rng: random.Random):
    first, last = rng.choice(FIRST), rng.choice(LAST)
    return [("Donor", None), (f"{first} {last}", "NAME"), ("is", None),
            (rng.choice(BLOOD), "BLOOD_TYPE"), ("and last gave on", None),
            (date(rng), "DATE"), (".", None)]


def _finance_templates(rng: random.Random):
    first, last = rng.choice(FIRST), rng.choice(LAST)
    return [
        [("Transfer", None), (amount(rng), "AMOUNT"),
         (rng.choice(CURRENCIES), "CURRENCY"), ("to", None),
         (iban(rng), "IBAN"), ("held at", None),
         (rng.choice(BANKS), "FINANCIAL_ENTITY"), (".", None)],
        [("Card ending", None), (str(rng.randint(1000, 9999)), "CREDIT_CARD_NUMBER"),
         ("for account", None), (account(rng), "ACCOUNT_NUMBER"),
         ("was charged", None), (amount(rng), "AMOUNT"), (".", None)],
        [(f"{first} {last}", "NAME"), ("authorised a debit of", None),
         (amount(rng), "AMOUNT"), (rng.choice(CURRENCIES), "CURRENCY"),
         ("from", None), (rng.choice(BANKS), "FINANCIAL_ENTITY"),
         ("account", None), (account(rng), "ACCOUNT_NUMBER"), (".", None)],
        [("Route via", None),
         (f"{rng.choice(['MERI', 'CRST', 'HARB'])}PTPL{rng.randint(100, 999)}", "SWIFT_BIC_CODE"),
         ("; reference PIN", None), (str(rng.randint(1000, 9999)), "PIN"),
         ("expires", None), (date(rng), "DATE"), (".", None)],
    ]


def _nemotron_templates(rng: random.Random):
    first, last = rng.choice(FIRST), rng.choice(LAST)
    full = f"{first} {last}"
    return [
        [("Invoice for", None), (full, "NAME"), ("due", None),
         (date(rng), "DATE"), ("; queries to", None),
         (f"{first.lower()}@{rng.choice(DOMAINS)}", "EMAIL"), (".", None)],
        [("Device", None),
         (":".join(f"{rng.randint(0, 255):02x}" for _ in range(6)), "MAC_ADDRESS"),
         ("registered by", None), (full, "PERSON"), ("in", None),
         (rng.choice(CITIES), "CITY"), (".", None)],
        [("Employee", None), (f"E-{rng.randint(10000, 99999)}", "EMPLOYEE_ID"),
         ("(", None), (full, "NAME"), (") moved to", None),
         (rng.choice(COMPANIES), "ORG"), (".", None)],
        [("Visit", None),
         (f"https://portal.{rng.choice(DOMAINS)}/claim/{rng.randint(100, 999)}", "URL"),
         ("and quote", None), (f"C-{rng.randint(100000, 999999)}", "CUSTOMER_ID"),
         (".", None)],
    ]


PLAIN_LINES = [
    "The quarterly review meeting moved to the large room upstairs .",
    "Nothing in this message requires follow-up from the records team .",
    "Bring the projector cable back when the workshop wraps up .",
    "The cafeteria menu rotates every second week without notice .",
    "Minutes from the standup were filed under general correspondence .",
]


def pieces_to_bio(pieces):
    tokens, labels = [], []
    for text, typ in pieces:
        parts = text.split()
        for j, part in enumerate(parts):
            tokens.append(part)
            if typ is None:
                labels.append("O")
            else:
                labels.append(("B-" if j == 0 else "I-") + typ)
    return tokens, labels


def pieces_to_tagged(pieces):
    out = []
    for text, typ in pieces:
        if typ is None:
            out.append(text)
        else:
            out.append(f"<{typ}>{text}</{typ}>")
    return " ".join(out)


def write_jsonl(path: Path, name: str, n: int, template_fn, rng: random.Random,
                blood_at: set[int] = frozenset()) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for i in range(n):
            if i in blood_at:
                pieces = _blood_template(rng)
            else:
                options = template_fn(rng)
                pieces = options[i % len(options)]
            tokens, labels = pieces_to_bio(pieces)
            obj = {"id": f"{name}-{i + 1:06d}", "tokens": tokens,
                   "labels": labels, "source": name}
            f.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")


def write_xml(path: Path, n: int, rng: random.Random) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for i in range(n):
            if i % 10 == 7:
                f.write(PLAIN_LINES[i % len(PLAIN_LINES)] + "\n")
            else:
                options = _nemotron_templates(rng)
                f.write(pieces_to_tagged(options[i % len(options)]) + "\n")


CONFIG = """\
# Demo pipeline config. Paths are relative to this file.
sources:
  - name: ai4privacy
    path: sources/ai4privacy.jsonl
    format: jsonl
  - name: gretel_finance
    path: sources/gretel_finance.jsonl
    format: jsonl
  - name: nemotron
    path: sources/nemotron.xml
    format: xml
seed: 42
output_dir: out
split_fractions:
  train: 0.8
  val: 0.1
  test: 0.1
rebalance:
  source: nemotron
  target_fraction: 0.10
caps:
  gretel_finance: 200
# The full corpus default of 100 would wipe most demo types; 5 keeps only
# the planted BLOOD_TYPE mentions below the bar.
rare_label_threshold: 5
"""


def main() -> None:
    (DEMO / "sources").mkdir(parents=True, exist_ok=True)
    write_jsonl(DEMO / "sources" / "ai4privacy.jsonl", "ai4privacy", 600,
                _privacy_templates, random.Random(401), blood_at={100, 300, 500})
    write_jsonl(DEMO / "sources" / "gretel_finance.jsonl", "gretel_finance", 250,
                _finance_templates, random.Random(402))
    write_xml(DEMO / "sources" / "nemotron.xml", 150, random.Random(403))
    (DEMO / "config.yaml").write_text(CONFIG, encoding="utf-8")
    print(f"wrote demo corpus under {DEMO}")


if __name__ == "__main__":
    main()
