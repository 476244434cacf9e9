#!/usr/bin/env python3
"""Expand base American/British spelling pairs into inflected forms.

Usage: build_dialect.py <pos_lexicon.tsv> <out-file>
Writes american<TAB>british lines, one pair per inflected form. Derived
forms other than plain inflections are kept only when the American form is
a known word in the POS lexicon.
"""
import sys

# base pairs followed by suffixes (appended identically to both spellings)
OUR = ["ardor", "armor", "behavior", "candor", "clamor", "color", "demeanor",
       "endeavor", "favor", "fervor", "flavor", "glamor", "harbor", "honor",
       "humor", "labor", "neighbor", "odor", "parlor", "rancor", "rigor",
       "rumor", "savior", "savor", "splendor", "tumor", "valor", "vapor", "vigor"]
OUR_SUFFIXES = ["", "s", "ed", "ing", "ful", "less", "able", "ably", "ite", "ites",
                "hood", "hoods", "ly", "y", "er", "ers"]
RE = ["center", "theater", "liter", "fiber", "caliber", "somber", "luster",
      "meager", "saber", "scepter", "specter", "sepulcher", "miter", "maneuver"]
RE_SUFFIXES = ["", "s", "ed", "ing"]
IZE = ["agonize", "apologize", "authorize", "baptize", "characterize", "civilize",
       "colonize", "criticize", "emphasize", "familiarize", "fertilize", "harmonize",
       "idolize", "itemize", "jeopardize", "legalize", "memorize", "mobilize",
       "modernize", "organize", "patronize", "realize", "recognize", "scrutinize",
       "summarize", "sympathize", "tantalize", "terrorize", "utilize", "visualize",
       "specialize", "standardize", "sterilize", "symbolize", "tyrannize",
       "apologize", "authorize", "economize", "energize", "hypnotize", "minimize",
       "monopolize", "neutralize", "penalize", "popularize", "satirize", "theorize",
       "vaporize", "vocalize", "antagonize", "capitalize", "centralize", "dramatize",
       "fraternize", "generalize", "immortalize", "improvise", "mesmerize",
       "moralize", "pulverize", "sanitize", "stabilize", "subsidize", "tranquilize"]
IZE_SUFFIXES = ["", "s", "d", "r", "rs"]
YZE = ["analyze", "paralyze", "catalyze"]
L_DOUBLE = ["travel", "cancel", "label", "level", "marvel", "quarrel", "model",
            "signal", "total", "fuel", "duel", "revel", "shovel", "tunnel", "rival",
            "channel", "dial", "equal", "spiral", "label", "pencil", "libel",
            "counsel", "grovel", "snivel", "swivel", "tinsel", "yodel", "cudgel",
            "chisel", "bevel", "dishevel", "enamel", "funnel", "gambol", "gravel",
            "jewel", "kennel", "panel", "pedal", "petal", "ravel", "unravel", "spancel"]
MISC = [
    ("gray", "grey"), ("grays", "greys"), ("grayish", "greyish"), ("grayness", "greyness"),
    ("wagon", "waggon"), ("wagons", "waggons"), ("wagoner", "waggoner"),
    ("plow", "plough"), ("plows", "ploughs"), ("plowed", "ploughed"), ("plowing", "ploughing"),
    ("plowman", "ploughman"), ("tire", "tyre"), ("tires", "tyres"),
    ("program", "programme"), ("programs", "programmes"), ("pajamas", "pyjamas"),
    ("mustache", "moustache"), ("mustaches", "moustaches"), ("aluminum", "aluminium"),
    ("jail", "gaol"), ("jails", "gaols"), ("jailer", "gaoler"), ("jailed", "gaoled"),
    ("skeptic", "sceptic"), ("skeptics", "sceptics"), ("skeptical", "sceptical"),
    ("skepticism", "scepticism"), ("mold", "mould"), ("molds", "moulds"), ("molded", "moulded"),
    ("molding", "moulding"), ("moldy", "mouldy"), ("smolder", "smoulder"),
    ("smolders", "smoulders"), ("smoldered", "smouldered"), ("smoldering", "smouldering"),
    ("molt", "moult"), ("catalog", "catalogue"), ("catalogs", "catalogues"),
    ("dialog", "dialogue"), ("ax", "axe"), ("whiskey", "whisky"), ("cozy", "cosy"),
    ("coziness", "cosiness"), ("esthetic", "aesthetic"), ("anemia", "anaemia"),
    ("anemic", "anaemic"), ("encyclopedia", "encyclopaedia"), ("fetus", "foetus"),
    ("artifact", "artefact"), ("artifacts", "artefacts"), ("judgment", "judgement"),
    ("judgments", "judgements"), ("acknowledgment", "acknowledgement"), ("aging", "ageing"),
    ("sulfur", "sulphur"), ("yogurt", "yoghurt"), ("licorice", "liquorice"),
    ("defense", "defence"), ("defenses", "defences"), ("defenseless", "defenceless"),
    ("offense", "offence"), ("offenses", "offences"), ("pretense", "pretence"),
    ("pretenses", "pretences"), ("jewelry", "jewellery"), ("woolen", "woollen"),
    ("woolens", "woollens"), ("counselor", "counsellor"), ("counselors", "counsellors"),
    ("traveler", "traveller"), ("travelers", "travellers"), ("jeweler", "jeweller"),
    ("jewelers", "jewellers"), ("fulfill", "fulfil"), ("fulfillment", "fulfilment"),
    ("skillful", "skilful"), ("skillfully", "skilfully"), ("willful", "wilful"),
    ("willfully", "wilfully"), ("installment", "instalment"), ("installments", "instalments"),
    ("enrollment", "enrolment"), ("distill", "distil"), ("instill", "instil"),
    ("analyzes", "analyses"), ("marvelous", "marvellous"), ("marvelously", "marvellously"),
    ("gruelling", "gruelling"), ("grueling", "gruelling"), ("draftsman", "draughtsman"),
    ("maneuverable", "manoeuvrable"), ("kidnaped", "kidnapped"), ("kidnaper", "kidnapper"),
    ("worshiped", "worshipped"), ("worshiping", "worshipping"), ("worshiper", "worshipper"),
    ("mama", "mamma"), ("sombrely", "sombrely"), ("somberly", "sombrely"),
    ("meagerly", "meagrely"), ("centimeter", "centimetre"), ("centimeters", "centimetres"),
    ("kilometer", "kilometre"), ("kilometers", "kilometres"), ("millimeter", "millimetre"),
    ("honorary", "honorary"), ("color-blind", "colour-blind"), ("colored", "coloured"),
    ("practicing", "practising"), ("practiced", "practised"),
    ("omelet", "omelette"), ("omelets", "omelettes"), ("checkered", "chequered"),
    ("disk", "disc"), ("disks", "discs"), ("vise", "vice"), ("sabers", "sabres"),
]


def pairs():
    out = []
    for w in OUR:
        base_gb = w[:-2] + "our"
        for s in OUR_SUFFIXES:
            out.append((w + s, base_gb + s, s not in ("", "s", "ed", "ing")))
    for w in RE:
        gb = w[:-2] + "re" if w != "maneuver" else "manoeuvre"
        for s in RE_SUFFIXES:
            if w == "maneuver":
                out.append((w + s, {"": "manoeuvre", "s": "manoeuvres", "ed": "manoeuvred",
                                    "ing": "manoeuvring"}[s]))
            elif s in ("ed", "ing"):
                out.append((w + s, gb[:-1] + s if s == "ed" else w[:-2] + "ring"))
            else:
                out.append((w + s, gb + s))
    for w in IZE:
        gb = w[:-3] + "ise"
        for s in IZE_SUFFIXES:
            out.append((w + s, gb + s))
        out.append((w[:-1] + "ing", gb[:-1] + "ing"))
        out.append((w[:-1] + "ation", gb[:-1] + "ation", True))
        out.append((w[:-1] + "ations", gb[:-1] + "ations", True))
    for w in YZE:
        gb = w[:-3] + "yse"
        for s in ("", "d", "r"):
            out.append((w + s, gb + s))
        out.append((w[:-1] + "ing", gb[:-1] + "ing"))
    for w in L_DOUBLE:
        for s in ("ed", "ing", "er", "ers"):
            out.append((w + s, w + "l" + s, s not in INFLECTIONS))
    out.extend(MISC)
    return out


INFLECTIONS = ("s", "ed", "ing", "d")


def main():
    known = set()
    with open(sys.argv[1]) as f:
        for line in f:
            known.add(line.split("\t", 1)[0])
    seen_us, seen_gb = set(), set()
    lines = []
    for entry in pairs():
        us, gb, derived = entry if len(entry) == 3 else (entry[0], entry[1], False)
        if us == gb or us in seen_us or gb in seen_gb:
            continue
        if derived and us not in known:
            continue
        seen_us.add(us)
        seen_gb.add(gb)
        lines.append("%s\t%s" % (us, gb))
    with open(sys.argv[2], "w") as f:
        f.write("# american<TAB>british spelling pairs\n")
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
