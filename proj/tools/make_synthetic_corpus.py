#!/usr/bin/env python3
# Copyright 2026 The phishevo Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled synthetic email corpus (data/synthetic_corpus.jsonl).

Every email is assembled from sentence templates with a seeded RNG, so the
output is byte-identical across runs. No real email is included.
"""

import argparse
import json
import random
from pathlib import Path

NAMES = ["Alex", "Jordan", "Sam", "Taylor", "Morgan", "Casey", "Riley", "Jamie",
         "Avery", "Quinn", "Drew", "Robin", "Parker", "Reese", "Rowan", "Sky"]
BANKS = ["Northbridge Bank", "Harbor Credit Union", "First Meridian", "Crestline Savings",
         "Pioneer Trust", "Summit Federal"]
SERVICES = ["PayFlow", "CloudDrive", "MailHub", "ShopNow", "StreamBox", "SecureID"]
PROJECTS = ["billing migration", "quarterly audit", "website redesign", "data warehouse",
            "hiring plan", "vendor review", "release train", "onboarding guide"]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]

PHISHING = [
    "Dear customer, we detected unusual sign in activity on your {service} account.",
    "Our security department has temporarily suspended your account to protect your funds.",
    "To restore full access you must verify your identity within {hours} hours.",
    "Please click the secure link below and confirm your login details immediately.",
    "Failure to update your information will result in permanent closure of the account.",
    "This is an official notification from the {bank} fraud prevention team.",
    "We apologize for the inconvenience and appreciate your prompt cooperation.",
    "Your recent payment of ${amount} could not be processed due to a billing error.",
    "Kindly reply with your full name, card number and password so we can reactivate service.",
    "Congratulations, you have been selected as the winner of a ${amount} gift card.",
    "To claim your reward simply log in and provide your banking details before {day}.",
    "Thousands of customers have already confirmed their accounts this week.",
    "An authorized agent will review your case once the verification form is complete.",
    "Your mailbox storage is almost full and incoming messages will be rejected.",
    "Reset your password now using the link below to avoid losing your files.",
    "The invoice attached requires urgent attention from your accounts payable team.",
    "Wire transfer reference {ref} is pending your approval, please confirm today.",
    "For your protection this link will expire in {hours} hours.",
    "If you do not act now we must lock the account and report the activity.",
    "We have issued a refund of ${amount} that will be released after you verify your card.",
    "Please follow the instructions provided to complete the security update.",
    "Our records show your tax return qualifies for an immediate refund.",
    "Your package could not be delivered, confirm the shipping address and pay the fee.",
    "As a valued member you are entitled to an exclusive offer that ends soon.",
    "Your colleague {name} shared a confidential document with you, sign in to view it.",
    "The {service} help desk requires you to validate your credentials today.",
    "Only a few spots remain, so make sure you respond before the deadline.",
    "Remember that you agreed to keep your account details current under the terms of service.",
    "Customer support will gladly assist once you submit the requested information.",
    "Do not ignore this message, it concerns the security of your savings.",
]

BENIGN = [
    "Hi {name}, thanks for sending the notes from the {project} meeting.",
    "I have attached the draft agenda for {day} and would welcome comments.",
    "The team lunch is moved to the small conference room on the third floor.",
    "Could you take a look at the updated timeline before our next sync?",
    "We finished the first round of testing and found only minor issues.",
    "Please remember to submit your timesheet by the end of the week.",
    "The kitchen will be closed on {day} afternoon for the scheduled cleaning.",
    "I uploaded the slides to the shared folder so everyone can review them.",
    "Let me know if {day} at {hour} works for a quick call about the {project}.",
    "The new printer on the second floor is finally working again.",
    "Great job on the presentation yesterday, the client seemed very pleased.",
    "Our book club will discuss the last three chapters next {day}.",
    "I will be out of the office on {day} but reachable by phone.",
    "The budget spreadsheet now includes the figures from the last quarter.",
    "Thanks again for covering the support rotation while I was away.",
    "The parking garage will be repainted over the weekend.",
    "Could you share the list of open questions for the {project}?",
    "We are planning a small farewell for {name} on {day} afternoon.",
    "The design review went well and we only need a few small changes.",
    "Please find the meeting minutes below and correct anything I missed.",
    "The volunteer day is confirmed and the bus leaves at {hour}.",
    "I reorganized the wiki pages so the onboarding material is easier to find.",
    "Happy to pair on the tricky part of the {project} later today.",
    "The training session recording is available on the intranet.",
    "Reminder that the office closes early before the holiday.",
    "I left a few comments in the document, nothing urgent.",
    "Let us keep the scope small for the first release and iterate afterwards.",
    "The catering order for the workshop has been placed for {hour}.",
    "{name} will lead the retrospective this time.",
    "Have a good weekend and see you all on {day}.",
]


def fill(template, rng):
    return template.format(
        name=rng.choice(NAMES), bank=rng.choice(BANKS), service=rng.choice(SERVICES),
        project=rng.choice(PROJECTS), day=rng.choice(DAYS),
        hours=rng.choice([12, 24, 48, 72]), amount=rng.randrange(50, 5000),
        ref=f"TX{rng.randrange(10**5, 10**6)}", hour=f"{rng.randrange(8, 18)}:{rng.choice(['00', '30'])}")


def make_email(pool, rng, min_words, max_words):
    target = rng.randrange(min_words, max_words + 1)
    order = pool[:]
    rng.shuffle(order)
    words = []
    sentences = []
    i = 0
    while len(words) < target:
        s = fill(order[i % len(order)], rng)
        i += 1
        sentences.append(s)
        words.extend(s.split())
    return " ".join(sentences)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "synthetic_corpus.jsonl"))
    parser.add_argument("--per-class", type=int, default=80)
    parser.add_argument("--seed", type=int, default=20240917)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    lines = []
    for label, pool, source in (("phishing", PHISHING, "synthetic-phish"),
                                ("benign", BENIGN, "synthetic-benign")):
        for i in range(args.per_class):
            body = make_email(pool, rng, 64, 160)
            lines.append(json.dumps({"id": f"{source}-{i:03d}", "source": source,
                                     "label": label, "body": body}))
    Path(args.out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
