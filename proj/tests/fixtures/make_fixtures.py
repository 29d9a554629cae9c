#!/usr/bin/env python3
# Copyright 2026 The hdc Authors.
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the label-tree fixtures under tests/fixtures/.

The ImageNet-style tree groups the 1000 ImageNet-1K class names (taken from
torchvision's category metadata) into a hand-curated WordNet-like hierarchy
of depth 7. Only needed when the fixtures change; the JSON output is checked in.
"""

import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def imagenet_classes():
    import torchvision

    return list(torchvision.models.ResNet50_Weights.IMAGENET1K_V1.meta["categories"])


def r(a, b):
    return list(range(a, b + 1))


def animal_tree(c):
    def leaves(idx):
        return [c[i] for i in idx]

    dogs_toy = [151, 152, 153, 154, 155, 156, 157, 158, 252, 254, 259, 262, 265, 266]
    dogs_hound = r(159, 178)
    dogs_terrier = r(179, 204)
    dogs_sporting = r(205, 221)
    dogs_working = r(222, 251) + [253, 255, 256, 257, 258, 260, 261, 263, 264, 267, 268]
    return {
        "vertebrate": {
            "mammal": {
                "carnivore": {
                    "toy dog": leaves(dogs_toy),
                    "hound": leaves(dogs_hound),
                    "terrier": leaves(dogs_terrier),
                    "sporting dog": leaves(dogs_sporting),
                    "working dog": leaves(dogs_working),
                    "wild canine": leaves(r(269, 280)),
                    "feline": leaves(r(281, 293)),
                    "bear": leaves(r(294, 297)),
                    "mustelid": leaves(r(356, 362)),
                    "small carnivore": leaves([298, 299, 387, 388]),
                },
                "primate": {
                    "ape": leaves(r(365, 369)),
                    "monkey": leaves(r(370, 382)),
                    "lemur": leaves([383, 384]),
                },
                "ungulate": {
                    "equine": leaves([339, 340]),
                    "swine": leaves(r(341, 343)),
                    "bovid": leaves(r(345, 353)),
                    "camelid": leaves([354, 355]),
                    "hippopotamus family": leaves([344]),
                },
                "rodent": leaves(r(333, 338)),
                "lagomorph": leaves(r(330, 332)),
                "marsupial": leaves([104, 105, 106]),
                "monotreme": leaves([102, 103]),
                "marine mammal": leaves(r(147, 150)),
                "proboscidean": leaves([101, 385, 386]),
                "xenarthran": leaves([363, 364]),
            },
            "bird": {
                "game bird": leaves([7, 8] + r(80, 86)),
                "ratite": leaves([9]),
                "songbird": leaves(r(10, 20)),
                "raptor": leaves(r(21, 24)),
                "parrot": leaves(r(87, 90)),
                "coraciiform": leaves(r(91, 96)),
                "waterfowl": leaves(r(97, 100)),
                "wading bird": leaves(r(127, 143)),
                "seabird": leaves(r(144, 146)),
            },
            "reptile": {
                "turtle": leaves(r(33, 37)),
                "lizard": leaves(r(38, 48)),
                "crocodilian": leaves([49, 50]),
                "snake": leaves(r(52, 68)),
                "dinosaur": leaves([51]),
            },
            "amphibian animal": {
                "salamander": leaves(r(25, 29)),
                "frog": leaves(r(30, 32)),
            },
            "fish": {
                "cartilaginous fish": leaves(r(2, 6)),
                "bony fish": leaves([0, 1] + r(389, 397)),
            },
        },
        "invertebrate": {
            "arthropod": {
                "insect": {
                    "beetle": leaves(r(300, 307)),
                    "butterfly": leaves(r(321, 326)),
                    "winged insect": leaves(r(308, 320)),
                },
                "arachnid": leaves(r(70, 78)),
                "crustacean": leaves(r(118, 126)),
                "myriapod": leaves([79]),
                "extinct arthropod": leaves([69]),
            },
            "mollusk": leaves(r(112, 117)),
            "cnidarian": leaves(r(107, 109)),
            "worm": leaves([110, 111]),
            "echinoderm": leaves(r(327, 329)),
        },
    }


VEHICLE_GROUPS = {
    "car": ["ambulance", "beach wagon", "cab", "convertible", "jeep", "limousine",
            "minivan", "Model T", "racer", "sports car", "police van", "go-kart",
            "golfcart", "car wheel", "car mirror"],
    "truck": ["fire engine", "garbage truck", "moving van", "pickup", "tow truck",
              "trailer truck", "half track", "tank", "forklift", "tractor", "harvester",
              "thresher", "snowplow", "crane", "minibus", "school bus", "trolleybus",
              "recreational vehicle", "mobile home"],
    "rail vehicle": ["bullet train", "electric locomotive", "freight car",
                     "passenger car", "steam locomotive", "streetcar"],
    "watercraft": ["aircraft carrier", "amphibian", "canoe", "catamaran", "container ship",
                   "fireboat", "gondola", "lifeboat", "liner", "schooner", "speedboat",
                   "submarine", "trimaran", "yawl", "paddlewheel", "wreck"],
    "aircraft": ["airliner", "airship", "balloon", "parachute", "space shuttle",
                 "warplane", "missile", "projectile", "wing"],
    "human-powered vehicle": ["bicycle-built-for-two", "mountain bike", "tricycle",
                              "unicycle", "moped", "motor scooter", "jinrikisha",
                              "horse cart", "oxcart", "barrow", "shopping cart",
                              "bobsled", "dogsled", "snowmobile"],
}

STRUCTURE_GROUPS = {
    "shop": ["bakery", "barbershop", "bookshop", "butcher shop", "confectionery",
             "grocery store", "shoe shop", "tobacco shop", "toyshop", "restaurant"],
    "building": ["apiary", "barn", "boathouse", "castle", "church", "cinema",
                 "cliff dwelling", "greenhouse", "library", "lumbermill", "monastery",
                 "mosque", "palace", "planetarium", "prison", "stupa", "yurt",
                 "bell cote", "dome", "thatch", "tile roof", "birdhouse", "mountain tent"],
    "barrier": ["bannister", "breakwater", "chainlink fence", "dam", "picket fence",
                "stone wall", "worm fence", "turnstile", "sliding door", "grille",
                "window screen", "window shade", "shoji", "fire screen"],
    "monument": ["altar", "megalith", "obelisk", "totem pole", "triumphal arch",
                 "fountain", "maypole", "flagpole", "pedestal", "sundial", "vault"],
    "span": ["steel arch bridge", "suspension bridge", "viaduct", "pier", "dock",
             "drilling platform", "water tower", "beacon", "radio telescope",
             "solar dish", "patio", "maze", "stage", "carousel", "swing"],
}

OBJECT_GROUPS = {
    "musical instrument": ["accordion", "acoustic guitar", "banjo", "bassoon", "cello",
                           "chime", "cornet", "drum", "electric guitar", "flute",
                           "French horn", "gong", "grand piano", "harmonica", "harp",
                           "maraca", "marimba", "oboe", "ocarina", "organ", "panpipe",
                           "sax", "steel drum", "trombone", "upright", "violin",
                           "drumstick"],
    "electronic device": ["cassette player", "CD player", "cellular telephone",
                          "computer keyboard", "desktop computer", "dial telephone",
                          "hand-held computer", "hard disc", "home theater", "iPod",
                          "joystick", "laptop", "loudspeaker", "microphone", "modem",
                          "monitor", "mouse", "oscilloscope", "pay-phone", "photocopier",
                          "Polaroid camera", "printer", "projector", "radio",
                          "reflex camera", "remote control", "screen", "space bar",
                          "tape player", "television", "typewriter keyboard",
                          "cash machine", "cassette", "entertainment center", "switch",
                          "web site"],
    "appliance": ["dishwasher", "electric fan", "espresso maker", "hand blower", "iron",
                  "microwave", "refrigerator", "rotisserie", "sewing machine",
                  "space heater", "stove", "toaster", "vacuum", "waffle iron",
                  "washer", "vending machine", "slot", "gas pump", "parking meter",
                  "lawn mower", "Crock Pot"],
    "tool": ["can opener", "carpenter's kit", "chain saw", "cleaver", "corkscrew",
             "hammer", "hatchet", "letter opener", "plane", "plunger", "power drill",
             "screwdriver", "shovel", "spatula", "broom", "pick", "plow", "rule",
             "slide rule", "file", "hook", "nail", "screw", "chain", "coil", "knot",
             "padlock", "combination lock", "safety pin", "buckle", "paintbrush",
             "quill", "ballpoint", "fountain pen", "matchstick", "lighter", "torch",
             "loupe", "magnetic compass", "barometer", "odometer", "stethoscope",
             "syringe", "swab", "scale", "stopwatch", "hourglass", "analog clock",
             "digital clock", "digital watch", "wall clock", "tripod", "reel",
             "spindle", "potter's wheel", "guillotine", "mousetrap", "binoculars",
             "abacus", "lens cap", "oil filter", "disk brake", "seat belt", "pole",
             "paddle", "crutch", "stretcher", "neck brace", "muzzle", "whistle",
             "thimble", "pencil sharpener", "rubber eraser"],
    "weapon and armor": ["assault rifle", "bow", "cannon", "revolver", "rifle",
                         "holster", "scabbard", "breastplate", "bulletproof vest",
                         "chain mail", "cuirass", "shield", "pickelhaube",
                         "crash helmet", "football helmet", "gasmask", "mask"],
    "container": ["ashcan", "backpack", "barrel", "bathtub", "beaker", "beer bottle",
                  "beer glass", "bucket", "caldron", "carton", "chest", "coffee mug",
                  "coffeepot", "cocktail shaker", "crate", "Dutch oven", "envelope",
                  "frying pan", "goblet", "hamper", "ladle", "mailbag", "mailbox",
                  "measuring cup", "milk can", "mixing bowl", "packet", "pencil box",
                  "Petri dish", "piggy bank", "pill bottle", "pitcher", "plastic bag",
                  "pop bottle", "pot", "purse", "rain barrel", "saltshaker", "safe",
                  "shopping basket", "soap dispenser", "soup bowl", "strainer",
                  "teapot", "tray", "tub", "vase", "wallet", "washbasin",
                  "water bottle", "water jug", "whiskey jug", "wine bottle", "wok",
                  "wooden spoon", "plate rack", "plate", "cup", "mortar", "binder",
                  "medicine chest", "perfume", "lotion", "sunscreen", "hair spray",
                  "face powder", "lipstick"],
    "furniture": ["barber chair", "bassinet", "bookcase", "china cabinet", "chiffonier",
                  "cradle", "crib", "desk", "dining table", "folding chair",
                  "four-poster", "park bench", "pool table", "rocking chair",
                  "studio couch", "throne", "toilet seat", "wardrobe", "table lamp",
                  "lampshade", "spotlight", "candle", "jack-o'-lantern", "radiator",
                  "quilt", "pillow", "doormat", "prayer rug", "sleeping bag",
                  "mosquito net", "shower curtain", "theater curtain"],
    "sports equipment": ["balance beam", "barbell", "baseball", "basketball",
                         "croquet ball", "dumbbell", "golf ball", "horizontal bar",
                         "parallel bars", "ping-pong ball", "puck", "punching bag",
                         "racket", "rugby ball", "ski", "snorkel", "soccer ball",
                         "tennis ball", "volleyball", "scoreboard", "knee pad",
                         "pinwheel", "teddy", "jigsaw puzzle", "crossword puzzle"],
    "headwear": ["bathing cap", "bearskin", "bonnet", "cowboy hat", "mortarboard",
                 "shower cap", "sombrero", "ski mask", "wig", "hair slide"],
    "footwear": ["clog", "cowboy boot", "Loafer", "running shoe", "sandal", "sock",
                 "Christmas stocking"],
    "garment": ["abaya", "academic gown", "apron", "bib", "bikini", "bolo tie",
                "bow tie", "brassiere", "cardigan", "cloak", "diaper", "feather boa",
                "fur coat", "gown", "hoopskirt", "jean", "jersey", "kimono", "lab coat",
                "maillot", "maillot tank suit", "military uniform", "miniskirt",
                "mitten", "necklace", "overskirt", "pajama", "poncho", "sarong",
                "stole", "suit", "sunglass", "sunglasses", "sweatshirt",
                "swimming trunks", "trench coat", "vestment", "Windsor tie",
                "velvet", "wool", "handkerchief", "umbrella", "oxygen mask"],
    "printed matter": ["book jacket", "comic book", "menu", "notebook", "street sign",
                       "traffic light", "manhole cover", "honeycomb", "spider web",
                       "toilet tissue", "paper towel", "bath towel", "dishrag",
                       "Band Aid", "bottlecap", "nipple", "pirate", "brass"],
}

FOOD_GROUPS = {
    "dish": [924, 925, 926, 933, 934, 935, 959, 962, 963, 964, 965],
    "dessert": [927, 928, 929, 960],
    "baked goods": [930, 931, 932, 961],
    "vegetable": list(range(936, 947)),
    "fruit": list(range(948, 958)),
    "beverage": [966, 967, 969],
    "fodder": [958],
}


def build_imagenet(c):
    tree = {
        "living thing": {
            "animal": animal_tree(c),
            "plant": {
                "flower": [c[i] for i in (984, 985, 986)],
                "seed and fruit": [c[i] for i in (987, 988, 989, 990)],
            },
            "fungus": [c[i] for i in (947, 991, 992, 993, 994, 995, 996, 997)],
            "person": [c[i] for i in (981, 982, 983)],
        },
        "non-living thing": {
            "transport vehicle": {},
            "structure": {},
            "object": {},
            "food": {k: [c[i] for i in v] for k, v in FOOD_GROUPS.items()},
            "natural formation": [c[i] for i in range(970, 981)] + [c[998]],
        },
    }

    used = set()

    def collect(node):
        if isinstance(node, list):
            used.update(node)
        else:
            for v in node.values():
                collect(v)

    collect(tree)
    remaining = [n for i, n in enumerate(c) if n not in used]
    rem = set(remaining)

    def take(groups):
        out = {}
        for g, names in groups.items():
            got = [n for n in names if n in rem]
            for n in got:
                rem.discard(n)
            if got:
                out[g] = got
        return out

    nl = tree["non-living thing"]
    veh = take(VEHICLE_GROUPS)
    nl["transport vehicle"] = {
        "wheeled vehicle": {k: veh[k] for k in ("car", "truck", "human-powered vehicle")},
        "rail vehicle": veh["rail vehicle"],
        "watercraft": veh["watercraft"],
        "aircraft": veh["aircraft"],
    }
    st = take(STRUCTURE_GROUPS)
    nl["structure"] = st
    ob = take(OBJECT_GROUPS)
    nl["object"] = {
        "instrumentality": {k: ob[k] for k in ("musical instrument", "electronic device",
                                               "appliance", "tool", "weapon and armor")},
        "container": ob["container"],
        "furnishing": ob["furniture"],
        "sports equipment": ob["sports equipment"],
        "clothing": {k: ob[k] for k in ("headwear", "footwear", "garment")},
        "covering and print": ob["printed matter"],
    }
    assert not rem, f"ungrouped classes: {sorted(rem)}"
    return tree


CIFAR100 = {
    "aquatic mammals": ["beaver", "dolphin", "otter", "seal", "whale"],
    "fish": ["aquarium fish", "flatfish", "ray", "shark", "trout"],
    "flowers": ["orchid", "poppy", "rose", "sunflower", "tulip"],
    "food containers": ["bottle", "bowl", "can", "cup", "plate"],
    "fruit and vegetables": ["apple", "mushroom", "orange", "pear", "sweet pepper"],
    "household electrical devices": ["clock", "keyboard", "lamp", "telephone", "television"],
    "household furniture": ["bed", "chair", "couch", "table", "wardrobe"],
    "insects": ["bee", "beetle", "butterfly", "caterpillar", "cockroach"],
    "large carnivores": ["bear", "leopard", "lion", "tiger", "wolf"],
    "large man-made outdoor things": ["bridge", "castle", "house", "road", "skyscraper"],
    "large natural outdoor scenes": ["cloud", "forest", "mountain", "plain", "sea"],
    "large omnivores and herbivores": ["camel", "cattle", "chimpanzee", "elephant", "kangaroo"],
    "medium-sized mammals": ["fox", "porcupine", "possum", "raccoon", "skunk"],
    "non-insect invertebrates": ["crab", "lobster", "snail", "spider", "worm"],
    "people": ["baby", "boy", "girl", "man", "woman"],
    "reptiles": ["crocodile", "dinosaur", "lizard", "snake", "turtle"],
    "small mammals": ["hamster", "mouse", "rabbit", "shrew", "squirrel"],
    "trees": ["maple tree", "oak tree", "palm tree", "pine tree", "willow tree"],
    "vehicles 1": ["bicycle", "bus", "motorcycle", "pickup truck", "train"],
    "vehicles 2": ["lawn mower", "rocket", "streetcar", "tank", "tractor"],
}

CIFAR_GROUPS = {
    "animal": ["aquatic mammals", "fish", "insects", "large carnivores",
               "large omnivores and herbivores", "medium-sized mammals",
               "non-insect invertebrates", "people", "reptiles", "small mammals"],
    "plant": ["flowers", "fruit and vegetables", "trees"],
    "artifact": ["food containers", "household electrical devices", "household furniture",
                 "large man-made outdoor things", "vehicles 1", "vehicles 2"],
    "scene": ["large natural outdoor scenes"],
}


def build_cifar():
    return {g: {s: CIFAR100[s] for s in subs} for g, subs in CIFAR_GROUPS.items()}


def to_adjacency(root_label, tree):
    nodes = []

    def add(label, sub):
        idx = len(nodes)
        nodes.append({"id": idx, "label": label, "children": []})
        if isinstance(sub, dict):
            for k, v in sub.items():
                nodes[idx]["children"].append(add(k, v))
        elif isinstance(sub, list):
            for leaf in sub:
                nodes[idx]["children"].append(add(leaf, None))
        return idx

    add(root_label, tree)
    return nodes


def depth_and_leaves(nodes):
    best, leaves = 0, 0
    stack = [(0, 0)]
    while stack:
        i, d = stack.pop()
        ch = nodes[i]["children"]
        if not ch:
            leaves += 1
            best = max(best, d)
        for k in ch:
            stack.append((k, d + 1))
    return best, leaves


def write(name, nodes):
    path = HERE / name
    with open(path, "w", encoding="utf-8") as f:
        f.write("[\n")
        for i, n in enumerate(nodes):
            f.write("  " + json.dumps(n, ensure_ascii=False))
            f.write(",\n" if i + 1 < len(nodes) else "\n")
        f.write("]\n")
    d, l = depth_and_leaves(nodes)
    print(f"{name}: nodes={len(nodes)} depth={d} leaves={l}")


def main():
    c = imagenet_classes()
    imagenet = to_adjacency("entity", build_imagenet(c))
    leaf_labels = [n["label"] for n in imagenet if not n["children"]]
    assert len(leaf_labels) == 1000 and set(leaf_labels) == set(c), "class set mismatch"
    synsets = {n["label"] for n in imagenet if n["children"]}
    assert not synsets & set(leaf_labels), "synset label equals a class label"
    write("imagenet_like.json", imagenet)
    write("cifar100_like.json", to_adjacency("entity", build_cifar()))

    synth = {f"group {a}": {f"family {a}{b}": [f"class {a}{b}{k}" for k in "xyz"]
                             for b in "abc"} for a in "123"}
    write("synthetic_27.json", to_adjacency("root", synth))
    write("minimal_4.json", to_adjacency("root", {"animal": ["cat", "dog"],
                                                  "tool": ["hammer", "saw"]}))


if __name__ == "__main__":
    main()
