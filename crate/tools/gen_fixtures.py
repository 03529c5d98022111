#!/usr/bin/env python3
"""Regenerates crates/core/fixtures. Deterministic: same script, same bytes."""

import json
import math
import os
import random
import shutil

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "crates", "core", "fixtures")
DEMO = os.path.join(ROOT, "demo")
MEDIA = os.path.join(DEMO, "media")
CORPUS = os.path.join(DEMO, "corpus")
TEXT = os.path.join(ROOT, "text")


def write(path, data, mode="w"):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, mode) as f:
        f.write(data)


# ---------------------------------------------------------------- images

def blob_field(seed, w, h, channels=1):
    rng = random.Random(seed)
    blobs = []
    for _ in range(14):
        blobs.append((
            rng.uniform(0, w), rng.uniform(0, h), rng.uniform(w / 14, w / 4),
            [rng.uniform(-120, 120) for _ in range(channels)],
        ))
    base = [rng.uniform(70, 180) for _ in range(channels)]
    gx, gy = rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)
    px = []
    for y in range(h):
        row = []
        for x in range(w):
            v = [b + gx * x + gy * y for b in base]
            for (cx, cy, r, amp) in blobs:
                d2 = ((x - cx) ** 2 + (y - cy) ** 2) / (r * r)
                if d2 < 9:
                    g = math.exp(-d2)
                    for c in range(channels):
                        v[c] += amp[c] * g
            row.append([max(0, min(255, int(round(t)))) for t in v])
        px.append(row)
    return px


def paste(px, src, x0, y0, size):
    out = [[list(p) for p in row] for row in px]
    for y in range(size):
        for x in range(size):
            out[y0 + y][x0 + x] = list(src[y][x])
    return out


def pgm(px):
    h, w = len(px), len(px[0])
    return b"P5\n%d %d\n255\n" % (w, h) + bytes(p[0] for row in px for p in row)


def ppm(px):
    h, w = len(px), len(px[0])
    return b"P6\n%d %d\n255\n" % (w, h) + bytes(c for row in px for p in row for c in p)


def save(name, data):
    write(os.path.join(MEDIA, name), data, "wb")


def video_frames(seed, n=10, size=128):
    bg = blob_field(seed, size, size)
    rng = random.Random(seed + 1)
    x, y = rng.randint(10, 40), rng.randint(10, 40)
    frames = []
    for i in range(n):
        f = [[list(p) for p in row] for row in bg]
        cx, cy = x + 6 * i, y + 3 * i
        for yy in range(cy, min(size, cy + 24)):
            for xx in range(cx, min(size, cx + 24)):
                f[yy][xx] = [235]
        frames.append(f)
    return frames


def save_video(dirname, frames):
    for i, f in enumerate(frames):
        save("%s/frame_%03d.pgm" % (dirname, i), pgm(f))


def build_media():
    harbour = blob_field(101, 256, 256)
    save("harbour.pgm", pgm(harbour))
    # Copy-move edit: a 64x64 region of the same picture pasted elsewhere.
    patch_src = [row[16:80] for row in harbour[168:232]]
    save("harbour_edited.pgm", pgm(paste(harbour, patch_src, 144, 48, 64)))
    save("stadium.pgm", pgm(blob_field(202, 256, 256)))
    save("wind_farm.ppm", ppm(blob_field(303, 256, 256, channels=3)))
    save("clinic.pgm", pgm(blob_field(404, 256, 256)))
    save("market.pgm", pgm(blob_field(505, 256, 256)))
    save("flood.pgm", pgm(blob_field(606, 256, 256)))

    ferry = video_frames(707)
    save_video("ferry_clip", ferry)
    edited = list(ferry)
    for i in (2, 4, 6, 8):
        stamp = [row[4:36] for row in ferry[i][90:122]]
        edited[i] = paste(ferry[i], stamp, 84, 20, 32)
    save_video("ferry_clip_edited", edited)
    save_video("rally_clip", video_frames(909))


# ---------------------------------------------------------------- text

CITIES = ["Aldermoor", "Brightwater", "Castleford", "Dunmere", "Eastholm", "Fenwick", "Glenrock",
          "Harlow Bay", "Ivybridge", "Kestrel Point", "Larkfield", "Milbrook"]
ORGS = ["the regional transport authority", "the city council", "the port authority",
        "the national statistics office", "the water board", "the university hospital",
        "the energy regulator", "the school district", "the county planning office"]
PEOPLE = ["Mara Lindqvist", "Tomas Okafor", "Helen Brandt", "Ravi Menon", "Sofia Castell",
          "Jonas Weir", "Amira Haddad", "Peter Novak", "Lena Fischer", "Omar Sayed"]
WEEKDAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]
MONTHS = ["March", "April", "May", "June", "September", "October"]

TOPICS = {
    "transport": {
        "title": ["{city} extends tram line to the northern districts",
                  "New bus timetable takes effect in {city}",
                  "{city} rail station upgrade reaches second phase"],
        "facts": [
            "The new line adds {n} stops between the central station and the business park.",
            "Construction crews laid {n} kilometres of track over the past {m} months.",
            "Trams will run every {k} minutes during the morning and evening peaks.",
            "The project budget stands at {n} million euros, funded jointly by {org} and the state.",
            "Ticket prices for single journeys stay at {k} euros until the end of the year.",
            "Passenger numbers on the existing route rose to {n} thousand per day last year.",
            "{person}, who leads {org}, presented the timetable at a meeting on {weekday}.",
            "Night services will operate on Fridays and Saturdays until two in the morning.",
            "The depot in {city} can now hold {k} vehicles after the extension.",
            "Cyclists may bring bicycles on board outside peak hours.",
            "Work on the final section is scheduled to finish in {month}.",
            "Residents can view the route map at the town hall and on the council website.",
            "Each vehicle carries up to {n} passengers, including {k} wheelchair spaces.",
        ],
    },
    "health": {
        "title": ["{city} hospital opens expanded outpatient wing",
                  "Health board publishes annual waiting time figures for {city}",
                  "New walk-in clinic begins seeing patients in {city}"],
        "facts": [
            "The outpatient wing has {n} consultation rooms and a separate children's area.",
            "Average waiting times for routine appointments fell to {k} weeks in {month}.",
            "{org} recruited {n} additional nurses during the past year.",
            "The clinic is open from eight in the morning to eight in the evening on weekdays.",
            "Patients can book appointments by telephone or through the online portal.",
            "The building cost {n} million euros and took {m} months to complete.",
            "{person}, the medical director, opened the wing on {weekday}.",
            "The casualty department treated {n} thousand patients last year.",
            "A pharmacy on the ground floor stays open until ten in the evening.",
            "Parking for {n} cars is available next to the main entrance.",
            "The health board will publish the next quarterly figures in {month}.",
            "Interpreters are available for {k} languages on request.",
            "The number of hospital beds in {city} now stands at {n}.",
        ],
    },
    "energy": {
        "title": ["Offshore wind farm near {city} starts supplying the grid",
                  "{city} approves solar panels on public buildings",
                  "Energy regulator sets new tariff for {city} households"],
        "facts": [
            "The wind farm consists of {n} turbines located {k} kilometres off the coast.",
            "Its installed capacity of {n} megawatts can supply about {m} thousand homes.",
            "{org} approved the connection to the regional grid in {month}.",
            "Solar panels will be fitted on {n} schools and {k} libraries over two years.",
            "The average household tariff changes to {k} cents per kilowatt hour from {month}.",
            "Maintenance vessels operate from the harbour in {city}.",
            "{person}, a spokesperson for {org}, described the timetable on {weekday}.",
            "The cable to shore runs for {n} kilometres along the sea bed.",
            "Construction employed about {n} workers at its peak.",
            "The turbines each stand {n} metres tall from sea level to the blade tip.",
            "Annual output is expected to reach {n} gigawatt hours.",
            "The operator will submit production figures to the regulator every quarter.",
            "A visitor centre explaining the project opens in {city} in {month}.",
        ],
    },
    "economy": {
        "title": ["Unemployment in {city} region falls to {k} percent",
                  "{city} market hall reopens with {n} traders",
                  "Port of {city} handles record container volume"],
        "facts": [
            "The unemployment rate in the region fell to {k} percent in {month}.",
            "The national statistics office counted {n} thousand people in work.",
            "The market hall reopened with {n} stalls selling food and crafts.",
            "Container traffic at the port rose to {n} thousand units over twelve months.",
            "{org} expects a further {k} shipping lines to call at the port next year.",
            "Average rents for commercial units in {city} stand at {k} euros per square metre.",
            "{person}, head of the chamber of commerce, presented the figures on {weekday}.",
            "The renovation of the market hall took {m} months.",
            "Retail sales in the city centre grew by {k} percent compared with last year.",
            "The port employs {n} people directly and supports jobs in logistics.",
            "New quay cranes with a reach of {n} metres entered service in {month}.",
            "Opening hours run from seven in the morning until six in the evening.",
            "The next labour market report is due in {month}.",
        ],
    },
    "education": {
        "title": ["{city} school district opens two new primary schools",
                  "University in {city} admits record number of students",
                  "{city} libraries extend weekend opening hours"],
        "facts": [
            "Each new school has room for {n} pupils in {k} classrooms.",
            "The university admitted {n} first year students this autumn.",
            "{org} hired {k} additional teachers for the new term.",
            "Libraries in {city} will open on Sundays from ten until four.",
            "The schools were built at a combined cost of {n} million euros.",
            "{person}, who chairs the school board, opened the first building on {weekday}.",
            "The library network lends about {n} thousand books each year.",
            "Classes at the new campus begin in {month}.",
            "The university offers {n} degree programmes across five faculties.",
            "School buses serve {k} routes across the district.",
            "A new sports hall is shared by both schools and local clubs.",
            "Enrolment forms are available from the district office.",
            "The student halls provide {n} rooms close to the main campus.",
        ],
    },
    "environment": {
        "title": ["River clean-up in {city} removes tonnes of waste",
                  "{city} plants thousands of trees along ring road",
                  "Water board upgrades treatment plant in {city}"],
        "facts": [
            "Volunteers removed {k} tonnes of waste from the river banks over {m} weekends.",
            "The council planted {n} trees along the ring road this season.",
            "The treatment plant now processes {n} million litres of water per day.",
            "{org} funded the upgrade with {n} million euros.",
            "Water quality samples are taken at {k} points along the river each month.",
            "{person}, the project coordinator, thanked the volunteers on {weekday}.",
            "The new filters were installed in {month}.",
            "Recycling rates in {city} reached {k} percent last year.",
            "The planting scheme uses {k} native species chosen by the parks department.",
            "A new cycle path follows the river for {n} kilometres.",
            "Results of the next survey will be published in {month}.",
            "The plant serves about {n} thousand households in the district.",
            "School groups can visit the wetland centre on weekday mornings.",
        ],
    },
    "sport": {
        "title": ["{city} stadium reopens after roof replacement",
                  "{city} hosts regional athletics championships",
                  "Marathon route through {city} announced"],
        "facts": [
            "The stadium holds {n} thousand spectators after the renovation.",
            "The new roof covers all four stands and took {m} months to build.",
            "About {n} athletes from {k} clubs entered the championships.",
            "The marathon route passes the harbour and the old town.",
            "Roads along the route close from six in the morning until two in the afternoon.",
            "{org} will run extra trains on race day.",
            "{person}, the event director, presented the course on {weekday}.",
            "Tickets for the opening match go on sale in {month}.",
            "The running track was resurfaced with a new synthetic layer.",
            "Registration for the marathon closes once {n} runners have signed up.",
            "Water stations will be placed every {k} kilometres.",
            "The club shop and museum reopen at the same time as the stadium.",
            "Parking near the stadium is limited to {n} spaces on match days.",
        ],
    },
}


def fill(s, rng, ctx):
    return s.format(city=ctx["city"], org=ctx["org"], person=ctx["person"],
                    n=rng.choice([12, 18, 24, 36, 40, 48, 55, 60, 72, 85, 120, 140, 250, 310]),
                    m=rng.choice([6, 8, 9, 11, 14, 18, 20]),
                    k=rng.choice([3, 4, 5, 6, 7, 8, 9]),
                    weekday=rng.choice(WEEKDAYS), month=rng.choice(MONTHS))


def make_doc(topic, idx, rng):
    spec = TOPICS[topic]
    ctx = {"city": CITIES[(idx * 5 + len(topic)) % len(CITIES)], "org": rng.choice(ORGS),
           "person": rng.choice(PEOPLE)}
    title = fill(spec["title"][idx % len(spec["title"])], rng, ctx)
    facts = list(spec["facts"])
    rng.shuffle(facts)
    body = " ".join(fill(f, rng, ctx) for f in facts[:12])
    return {"doc_id": "%s-%02d" % (topic, idx), "title": title, "body": body}


ORIGINAL = {
    "doc_id": "harbour-bridge-original",
    "title": "Harbour bridge reopens to traffic after repairs",
    "facts": [
        "The Harbour Bridge in Brightwater reopened to traffic on Monday after fourteen months of repairs.",
        "Engineers replaced 420 steel cables and resurfaced the full length of the deck.",
        "The repairs cost 38 million euros, shared between the city and the port authority.",
        "A speed limit of 50 kilometres per hour applies to all vehicles on the bridge.",
        "Cyclists now have a separate lane on the eastern side of the deck.",
        "The bridge carries about 32 thousand vehicles on a typical weekday.",
    ],
}

# Altered versions of the facts at the same positions.
SPUN = [
    "Nobody has driven across since crews abandoned the site in a hurry last winter.",
    "Only a handful of wires were swapped while many cracks remain untouched underneath.",
    "Auditors traced much of the money to consultants with ties to two local councillors.",
    "Heavy lorries keep rumbling over at any pace because no limits are enforced.",
]


def spun_body(n_altered):
    facts = list(ORIGINAL["facts"])
    for i in range(n_altered):
        facts[i] = SPUN[i]
    return " ".join(facts)


TONE_INFLAMMATORY = [
    ("Terror on the streets as corrupt officials destroy our city",
     "Panic and fear gripped Fenwick tonight as furious residents watched corrupt officials destroy "
     "the last public park. This outrage is a disgrace and a betrayal. Angry families say the "
     "council lied to them and they are terrified of what comes next. The scandal is a catastrophe "
     "for every child in the district. Residents are outraged, scared and enraged by the lies. "
     "One mother said the dangerous plan is a nightmare and the officials are traitors."),
    ("Deadly chaos feared as toxic spill threatens homes",
     "Residents of Glenrock are terrified after a toxic spill turned the creek into a deadly "
     "poison. Panic spread through the streets as families feared the worst. Furious neighbours "
     "blasted the company for its shameful and disgusting response. The catastrophe is a "
     "nightmare and a disgrace. Many say they are afraid to let children outside and accuse "
     "officials of lies, corruption and betrayal."),
    ("Rigged vote scandal sparks fury and fear",
     "Outrage exploded in Dunmere as angry voters accused officials of a rigged count. The scandal "
     "has left residents furious, scared and betrayed. Critics slam the crooks who destroyed trust "
     "in the ballot. Fear and rage are spreading across the county. One campaigner said the fraud "
     "is a disgrace and a threat to every family, and that the liars must face shame."),
]

TONE_NEUTRAL = [
    ("Council publishes new recycling collection calendar",
     "The city council has published the recycling collection calendar for next year. Paper and "
     "cardboard will be collected every second Tuesday, while glass collections move to the first "
     "Thursday of each month. Households can download the calendar from the council website or "
     "pick up a printed copy at the town hall. The garden waste service runs from March to "
     "November. Residents who move house should register their new address with the waste "
     "department."),
    ("Library extends weekend opening hours",
     "The central library in Larkfield will open on Sundays from ten until four starting next "
     "month. The change follows a review of visitor numbers over the past year. Study rooms can be "
     "booked online for up to three hours at a time. The children's section hosts a reading hour "
     "every Saturday morning. Membership remains free for residents of the district, and visitors "
     "from other towns can join for a small annual fee."),
    ("Ferry timetable changes for the winter season",
     "The ferry operator serving Kestrel Point has released its winter timetable. Crossings will "
     "depart every ninety minutes between six in the morning and ten at night. The last sailing on "
     "Sundays leaves at eight in the evening. Vehicle bookings open four weeks in advance. "
     "Passengers travelling on foot can buy tickets at the terminal or on board. The summer "
     "timetable returns in April."),
]

WQS_CLEAN = (
    "The regional library network opened a new branch in the old market building on Monday. "
    "The branch offers study rooms, a children's reading corner and computers for public use. "
    "Opening hours run from nine in the morning until seven in the evening on weekdays. "
    "Staff will run weekly classes that help older residents use online services. "
    "The council funded the renovation through its annual budget for community facilities."
)


def build_texts(rng):
    docs = []
    for topic in TOPICS:
        for i in range(5):
            docs.append(make_doc(topic, i, rng))
    docs.append({"doc_id": ORIGINAL["doc_id"], "title": ORIGINAL["title"],
                 "body": " ".join(ORIGINAL["facts"])})
    for i, (title, body) in enumerate(TONE_NEUTRAL):
        docs.append({"doc_id": "notice-%02d" % i, "title": title, "body": body})
    for d in docs:
        write(os.path.join(CORPUS, d["doc_id"] + ".json"), json.dumps(d, indent=2) + "\n")

    for n in (2, 4):
        write(os.path.join(TEXT, "spun_%d.json" % n),
              json.dumps({"title": ORIGINAL["title"], "body": spun_body(n)}, indent=2) + "\n")
    write(os.path.join(TEXT, "original.json"),
          json.dumps({"doc_id": ORIGINAL["doc_id"], "title": ORIGINAL["title"],
                      "body": " ".join(ORIGINAL["facts"])}, indent=2) + "\n")
    for kind, items in (("inflammatory", TONE_INFLAMMATORY), ("neutral", TONE_NEUTRAL)):
        for i, (title, body) in enumerate(items):
            write(os.path.join(TEXT, "tone", "%s_%d.txt" % (kind, i + 1)), title + "\n\n" + body + "\n")
    write(os.path.join(TEXT, "wqs_clean.txt"), WQS_CLEAN + "\n")
    return {d["doc_id"]: d for d in docs}


def sentences(body, n):
    parts, cur = [], ""
    for tok in body.split(" "):
        cur = (cur + " " + tok).strip()
        if tok.endswith("."):
            parts.append(cur)
            cur = ""
    return " ".join(parts[:n])


# ---------------------------------------------------------------- feed

def build_feed(docs):
    health = {"concept": "society", "category": "health", "topic": "vaccination"}
    transport = {"concept": "society", "category": "infrastructure", "topic": "transport"}
    env = {"concept": "science", "category": "environment", "topic": "energy"}
    politics = {"concept": "politics", "category": "local", "topic": "council"}
    sport = {"concept": "culture", "category": "sport", "topic": "events"}
    economy = {"concept": "economy", "category": "regional", "topic": "labour"}

    def item(day, hour, url, publisher, title, body="", summary="", images=(), videos=(), topic=None,
             eng=(0, 0, 0)):
        it = {
            "url": url, "title": title, "summary": summary, "body": body,
            "image_refs": list(images), "video_refs": list(videos), "publisher": publisher,
            "published_at": "2026-09-%02dT%02d:00:00Z" % (day, hour),
            "likes": eng[0], "shares": eng[1], "comments": eng[2],
        }
        if topic:
            it["topic"] = topic
        return it

    orig = " ".join(ORIGINAL["facts"])
    items = [
        # A1: every fragment kind, every analyzer has something to say.
        item(1, 8, "https://brightwater-herald.example/news/harbour-bridge-reopens", "Brightwater Herald",
             ORIGINAL["title"], orig,
             "The bridge is open again after more than a year of work.",
             ["media/harbour.pgm"], ["media/ferry_clip"], transport, (420, 96, 31)),
        item(1, 12, "https://coastal-times.example/health/walk-in-clinic", "Coastal Times",
             "New vaccine clinic opens its doors in " + docs["health-02"]["title"].split(" in ")[-1],
             sentences(docs["health-02"]["body"], 8) + " The vaccine service runs on weekday afternoons.",
             images=["media/clinic.pgm"], topic=health, eng=(210, 40, 12)),
        item(2, 9, "https://coastal-times.example/energy/wind-farm-grid", "Coastal Times",
             docs["energy-00"]["title"], sentences(docs["energy-00"]["body"], 10),
             images=["media/wind_farm.ppm"], topic=env, eng=(150, 22, 9)),
        item(2, 15, "https://daily-ledger.example/sport/stadium-roof", "Daily Ledger",
             docs["sport-00"]["title"], sentences(docs["sport-00"]["body"], 9),
             images=["media/stadium.pgm"], topic=sport, eng=(980, 130, 77)),
        item(3, 10, "https://regional-wire.example/economy/unemployment", "Regional Wire",
             docs["economy-00"]["title"], sentences(docs["economy-00"]["body"], 10),
             images=["media/market.pgm"], topic=economy, eng=(88, 10, 4)),
        item(3, 18, "https://regional-wire.example/transport/ferry-footage", "Regional Wire",
             "Ferry crossing resumes in calm weather",
             "The morning ferry crossed the bay on schedule. " + TONE_NEUTRAL[2][1],
             videos=["media/rally_clip"], topic=transport, eng=(64, 8, 2)),
        item(4, 7, "https://coastal-times.example/health/vaccine-supply", "Coastal Times",
             "Regional vaccine supply figures published",
             sentences(docs["health-04"]["body"], 8)
             + " The health board said the vaccine deliveries arrived on schedule.",
             topic=health, eng=(300, 55, 20)),
        item(4, 13, "https://truthpatriot.example/posts/bridge-cover-up", "Truth Patriot Daily",
             ORIGINAL["title"], spun_body(4),
             images=["media/harbour.pgm"], topic=transport, eng=(5400, 2100, 830)),
        item(5, 9, "https://streetvoice.example/p/park-outrage", "Street Voice",
             TONE_INFLAMMATORY[0][0], TONE_INFLAMMATORY[0][1], topic=politics, eng=(7600, 3400, 1200)),
        item(5, 16, "https://daily-ledger.example/environment/river-cleanup", "Daily Ledger",
             docs["environment-00"]["title"], sentences(docs["environment-00"]["body"], 10),
             images=["media/flood.pgm"], topic=env, eng=(120, 14, 6)),
        item(6, 11, "https://viralnow.example/storm-hits-port", "Viral Now",
             "BREAKING!!! Storm smashes port, you won't believe the photos!!!",
             "SHOCKING images show the port after last night's storm. Share this before it's deleted!!! "
             "The mainstream media will not show you these exclusive photos. Click here for more!!!",
             images=["media/harbour_edited.pgm"], topic=transport, eng=(12000, 6400, 2100)),
        item(6, 19, "https://streetvoice.example/p/toxic-spill", "Street Voice",
             TONE_INFLAMMATORY[1][0], TONE_INFLAMMATORY[1][1], topic=env, eng=(4300, 1900, 640)),
        item(7, 8, "https://brightwater-herald.example/news/library-hours", "Brightwater Herald",
             TONE_NEUTRAL[1][0], TONE_NEUTRAL[1][1], topic=politics, eng=(45, 3, 1)),
        item(7, 14, "https://viralnow.example/vaccine-secret", "Viral Now",
             "They don't want you to know the vaccine secret!!!",
             "WAKE UP!!! The shocking truth about the vaccine is finally EXPOSED. Doctors hate this one "
             "weird trick. Fake news outlets are hiding the bombshell everybody is talking about. Share "
             "this NOW before it gets banned!!! You won't believe what happens next.",
             topic=health, eng=(15000, 8800, 3100)),
        item(8, 10, "https://clipfarm.example/ferry-video", "Clip Farm",
             "Exclusive footage of the bay crossing",
             summary="Footage of a ferry crossing the bay.",
             videos=["media/ferry_clip"], topic=transport, eng=(2600, 900, 150)),
        item(8, 17, "https://clipfarm.example/ferry-video-remix", "Clip Farm",
             "Ferry footage shows strange object on deck",
             summary="A second clip of the ferry crossing.",
             videos=["media/ferry_clip_edited"], topic=transport, eng=(3900, 1500, 420)),
        item(9, 9, "https://regional-wire.example/education/new-schools", "Regional Wire",
             docs["education-00"]["title"], sentences(docs["education-00"]["body"], 10),
             topic=economy, eng=(70, 9, 3)),
        item(9, 15, "https://daily-ledger.example/sport/marathon-route", "Daily Ledger",
             docs["sport-02"]["title"], sentences(docs["sport-02"]["body"], 10),
             topic=sport, eng=(510, 60, 25)),
        item(10, 8, "https://streetvoice.example/p/rigged-vote", "Street Voice",
             TONE_INFLAMMATORY[2][0], TONE_INFLAMMATORY[2][1], topic=politics, eng=(6100, 2500, 990)),
        item(10, 12, "https://brightwater-herald.example/news/recycling-calendar", "Brightwater Herald",
             TONE_NEUTRAL[0][0], TONE_NEUTRAL[0][1], topic=politics, eng=(30, 2, 0)),
    ]
    lines = [json.dumps(i, ensure_ascii=False) for i in items]
    write(os.path.join(DEMO, "feed.jsonl"), "\n".join(lines) + "\n")
    write(os.path.join(DEMO, "empty.jsonl"), "")


def main():
    if os.path.isdir(ROOT):
        shutil.rmtree(ROOT)
    rng = random.Random(20260901)
    build_media()
    docs = build_texts(rng)
    build_feed(docs)


if __name__ == "__main__":
    main()
