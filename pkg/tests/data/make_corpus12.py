"""Regenerates the bundled 12-firm synthetic corpus (corpus12/).

Run from the repo root:  python tests/data/make_corpus12.py
The corpus is committed; regenerate only when the design changes. The
PDF fixture embeds a creation date, so regenerating it changes bytes
(but not extracted text).
"""

from __future__ import annotations

import csv
from pathlib import Path

ROOT = Path(__file__).parent / "corpus12"

# Paragraph building blocks. Stub rules (see climatext.classify.backends):
#   risk: risk/threat/hazard/stranded/exposure/liability
#   opportunity: opportunity/growth/benefit/advantage
#   commitment: commit/pledge/we aim/our goal/...
#   specific: %, " by 20", " tonnes", baseline, ...
#   netzero: net zero / carbon neutral;  reduction: emission reduction/...
# Keyword filter needs a climate phrase in every retained paragraph.

# Expected report-level labels (frozen into tests/test_pipeline_cli.py):
#   AMBERWIND    risk             commitment     specific  netzero
#   BLUEHARBOR   opportunity      no_commitment  general   no_reduction
#   CINDERPEAK   risk             commitment     specific  reduction_netzero
#   DELTAGRID    risk             commitment     specific  netzero
#   EVERYARD     neutral          commitment     general   netzero
#   FERNWAVE     neutral          commitment     specific  no_reduction
#   GRAINHOLM    neutral          no_commitment  general   reduction
#   HOLLOWPINE   risk_opportunity commitment     specific  netzero
#   IRONVALE     risk             commitment     specific  reduction
#   JUNIPERTECH  opportunity      no_commitment  specific  netzero
#   KESTRELFOODS neutral          commitment     general   no_reduction
#   LUMENWEAR    (skipped: nothing climate-relevant)

DOCS: dict[str, list[str]] = {
    "AMBERWIND": [
        "Climate change poses a material transition risk to our generation "
        "portfolio.",
        "We commit to net zero across scope 1 and scope 2 emissions by 2040, "
        "with a 45% interim milestone versus 2019 baseline.",
        "We pledge an 80% renewable share by 2030, and our climate strategy "
        "funds it.",
        "Flood hazard mapping covers our coastal plants as climate change "
        "intensifies.",
        "Our greenhouse gas inventory reports 2.1 million tonnes of scope 1 "
        "emissions.",
        "Executive pay is dedicated to our net zero trajectory and "
        "decarbonization milestones.",
        "Our annual community program funds local schools and arts events.",
        "Page 7",
    ],
    "BLUEHARBOR": [
        "The low-carbon transition is a growth opportunity for our climate "
        "change advisory practice.",
        "Clients ask for carbon footprint reviews, an expanding opportunity "
        "for the bank.",
        "Climate change considerations appear in our lending standards.",
        "Our funds track ghg disclosures across portfolios.",
        "Our wealth management division expanded into four new markets.",
        "Deposits grew across retail segments led by digital onboarding.",
    ],
    "CINDERPEAK": [
        "Carbon intensity is the key risk for our smelters as climate change "
        "rules tighten.",
        "We commit to a 30% emission reduction by 2030 from a 2020 baseline.",
        "Our goal is net zero for direct emissions by 2050.",
        "Stranded asset risk for legacy furnaces is tested under our climate "
        "strategy and net zero plan.",
        "Scope 1 emissions fell to 840,000 tonnes after electrification; we "
        "will reduce emissions further with an emission reduction roadmap.",
        "The specialty alloys unit gained share in aerospace.",
    ],
    "DELTAGRID": [
        "Storm hazard exposure grows with climate change across our service "
        "area.",
        "We are dedicated to net zero operations by 2045 under our filed "
        "climate target.",
        "Scope 2 emissions dropped 12% versus 2022; we aim higher through "
        "decarbonization.",
        "Transition risk from fuel-switching mandates affecting 30% of load "
        "is reviewed quarterly.",
        "Our goal is carbon neutral electricity; we commit funds to storage "
        "pilots under the climate strategy.",
        "We maintain critical spares for transformers across two regions.",
    ],
    "EVERYARD": [
        "Our portfolio reports its carbon footprint under the greenhouse gas "
        "protocol.",
        "We aim for net zero operational carbon across managed buildings.",
        "Tenant programs cover climate change awareness; we commit to yearly "
        "training.",
        "We pledge annual disclosure aligned with our climate strategy.",
        "Energy audits feed our net zero roadmap for the managed estate.",
        "Occupancy rates remained stable across suburban assets.",
        "Lobby renovations completed in fourteen properties this year.",
    ],
    "FERNWAVE": [
        "Cloud efficiency lowered data-center carbon intensity 18% versus "
        "2023.",
        "We commit to publishing our greenhouse gas inventory quarterly, "
        "covering 100% of facilities.",
        "Climate change reporting follows the ghg protocol with scope 3 "
        "estimates of 98,000 tonnes.",
        "Our goal is to double renewable coverage; climate strategy spending "
        "rose.",
        "We are dedicated to transparent carbon footprint labels on every "
        "rack unit.",
        "Our developer platform grew to two million registered accounts.",
    ],
    "GRAINHOLM": [
        "Our mills track scope 1 and scope 2 emissions under the greenhouse "
        "gas protocol.",
        "An emission reduction program targets freight efficiency across the "
        "grain network.",
        "Climate change may shift harvest timing in northern regions.",
        "Suppliers report co2 data through our procurement portal.",
        "The fleet program should lower emissions and shrink our emissions "
        "footprint.",
        "Private-label volumes increased in all categories.",
    ],
    "HOLLOWPINE": [
        "Raw material exposure to climate change affects 40% of inputs, the "
        "dominant risk in our outlook.",
        "Carbon border rules create cost risk for export lines, adding 12% "
        "to landed cost under scope 1 accounting.",
        "Electrified kilns are a growth opportunity; we pledge funding under "
        "our climate strategy toward net zero.",
        "Waste-heat recovery gives a margin benefit; we aim to shrink our "
        "emissions footprint.",
        "We commit to net zero by 2045 and a 50% cut by 2032 versus 2020 "
        "baseline for scope 1 emissions.",
        "Group revenue grew modestly on services demand.",
    ],
    "IRONVALE": [
        "Blast furnaces face carbon cost risk as climate change policy "
        "tightens allowances.",
        "We will reduce emissions 25% by 2030 against a 2021 baseline, our "
        "stated emission reduction target.",
        "Scope 1 emissions of 3.4 million tonnes dominate our carbon "
        "footprint; we commit to third-party verification.",
        "Hydrogen trials revealed hazard management gaps and transition risk "
        "in supply contracts.",
        "Our goal is cutting emissions intensity 5% annually with a "
        "reduction target for every site.",
        "Pension scheme funding improved over the year.",
    ],
    "JUNIPERTECH": [
        "Climate tech demand is a growth opportunity; our sensors verify "
        "1.2 million tonnes of co2.",
        "Customers use the platform to check net zero claims spanning "
        "40,000 tonnes of monthly flux.",
        "Greenhouse gas leak monitoring is an expanding market opportunity "
        "for our analyzers.",
        "The platform's own operations run carbon neutral on zero emission "
        "power.",
        "Hiring focused on firmware and field engineering this year.",
    ],
    "KESTRELFOODS": [
        "We disclose our carbon footprint annually including scope 1, "
        "scope 2 and scope 3 emissions.",
        "We are dedicated to sustainable sourcing under our climate "
        "strategy.",
        "Climate change scenarios inform sourcing of cocoa and wheat.",
        "We pledge transparency on overall emissions in every annual "
        "report.",
        "Our goal is responsible packaging; ghg data guides material "
        "choices.",
        "Store-brand growth outpaced the category in all quarters.",
    ],
    # no climate-relevant paragraphs at all: lands on the skip list
    "LUMENWEAR": [
        "Our spring collection launched across flagship stores.",
        "Loyalty membership reached record levels this season.",
        "Two logistics hubs were consolidated to shorten lead times.",
    ],
}

# firm_id, sector, scope1, scope2, scope3, employees, market_cap_bln
FIRMS = [
    ("AMBERWIND", "Énergie", 2_100_000, 300_000, 5_000_000, 45_000, 120.0),
    ("BLUEHARBOR", "Finances", 12_000, 30_000, "", 3_000, 15.0),
    ("CINDERPEAK", "Matériaux de base", 840_000, 150_000, 2_400_000, 12_000, 45.0),
    ("DELTAGRID", "Fournisseur", 450_000, 95_000, 800_000, 9_000, 8.0),
    ("EVERYARD", "Immobilier", 9_000, 22_000, 110_000, 800, 3.0),
    ("FERNWAVE", "Technologie de l'information", 15_000, 60_000, 98_000, 100_000, 220.0),
    ("GRAINHOLM", "Consommation non cyclique", 160_000, 75_000, 1_900_000, 25_000, 1.5),
    ("HOLLOWPINE", "Industrie", 520_000, 120_000, "", 18_000, 28.0),
    ("IRONVALE", "Industrie", 3_400_000, 400_000, 9_500_000, 55_000, 60.0),
    ("JUNIPERTECH", "Technologie de l'information", 1_200, 2_500, 15_000, 150, 0.8),
    ("KESTRELFOODS", "Consommation cyclique", 95_000, 48_000, 1_100_000, 7_138, 5.5),
    ("LUMENWEAR", "Consommation cyclique", 30_000, 18_000, 260_000, 1_200, 2.0),
]


def write_pdf(path: Path, paragraphs: list[str]) -> None:
    from reportlab.lib.pagesizes import letter
    from reportlab.lib.styles import getSampleStyleSheet
    from reportlab.platypus import PageBreak, Paragraph, SimpleDocTemplate

    styles = getSampleStyleSheet()
    story = []
    for i, p in enumerate(paragraphs):
        story.append(Paragraph(p, styles["Normal"]))
        if i == len(paragraphs) // 2:
            story.append(PageBreak())
    SimpleDocTemplate(str(path), pagesize=letter).build(story)


def main() -> None:
    docs_dir = ROOT / "docs"
    docs_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for firm_id, paragraphs in DOCS.items():
        if firm_id == "AMBERWIND":
            fname = f"{firm_id.lower()}.pdf"
            write_pdf(docs_dir / fname, paragraphs)
        else:
            fname = f"{firm_id.lower()}.txt"
            (docs_dir / fname).write_text("\n\n".join(paragraphs) + "\n",
                                          encoding="utf-8")
        rows.append([firm_id, f"docs/{fname}", 2023, "sustainability_report"])

    with open(ROOT / "manifest.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["firm_id", "path", "doc_year", "kind"])
        w.writerows(rows)

    with open(ROOT / "firms.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["firm_id", "sector", "scope1", "scope2", "scope3",
                    "employees", "market_cap_bln"])
        w.writerows(FIRMS)
    print(f"wrote corpus to {ROOT}")


if __name__ == "__main__":
    main()
