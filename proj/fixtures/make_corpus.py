#!/usr/bin/env python3
"""Deterministic generator for the offline end-to-end fixture world.

Produces, relative to this file:
  corpus/        HTML pages + manifest.json for the fixture search backend
  stub/          scripted model responses keyed by request fingerprint
  datasets/      mentions.jsonl (runner input), labeled.jsonl (gold labels),
                 pairs15.jsonl (hand-scored decision pairs)
  config/        fixture.json run configuration wired to the above

The corpus is built so retrieval difficulty rises across tiers:
  A: English homepage; the plain English query succeeds.
  B: native homepage with a romanized parenthetical; English-language news
     distractors outrank it on the English query, so only the native-language
     institution query reaches it.
  C: native homepage with no romanization at all; conference rosters tie it on
     the plain native query and win the URL tie-break, so only the
     email-augmented query retrieves it and only a recovered native name
     confirms it.
  D: the mention itself is native script; direct search succeeds.
Plus one unresolvable mention (no pages exist for it).

Everything is deterministic: no timestamps, no randomness, stable key order.
"""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent

# ---------------------------------------------------------------------------
# Roster


def scholar(key, tier, pinyin, native, inst_en, inst_zh, home, kw, edu_school,
            edu_degree, edu_years, title, city="", email=None, workplace=None,
            dept_clause=""):
    return {
        "key": key, "tier": tier, "pinyin": pinyin, "native": native,
        "inst_en": inst_en, "inst_zh": inst_zh, "home": home, "kw": kw,
        "edu_school": edu_school, "edu_degree": edu_degree,
        "edu_years": edu_years, "title": title, "city": city, "email": email,
        # what the extracted profile and the gold label record as workplace
        "workplace": workplace or (inst_en if tier == "A" else inst_zh),
        "dept_clause": dept_clause,  # extra unit named on the English homepage
    }


SCHOLARS = [
    # Tier A: English homepages. Two homonym pairs (Wang Wei, Li Na).
    scholar("wang-wei-fd", "A", "Wang Wei", None, "Fudan University", "复旦大学",
            "https://phys.fudan.example.cn/wangwei",
            ["superconductivity", "vortex dynamics"],
            "Nanjing University", "PhD", "2005 - 2010", "Professor", "Shanghai"),
    scholar("wang-wei-zj", "A", "Wang Wei", None, "Zhejiang University", "浙江大学",
            "https://vision.zju.example.cn/wangwei",
            ["computer vision", "image segmentation"],
            "Zhejiang University", "PhD", "2008 - 2013", "Professor", "Hangzhou"),
    scholar("li-na-nk", "A", "Li Na", None, "Nankai University", "南开大学",
            "https://chem.nankai.example.cn/lina",
            ["organic synthesis", "asymmetric catalysis"],
            "Nankai University", "PhD", "2006 - 2011", "Professor", "Tianjin"),
    scholar("li-na-cs", "A", "Li Na", None, "Central South University", "中南大学",
            "https://meta.csu.example.cn/lina",
            ["alloy design", "powder metallurgy"],
            "Central South University", "PhD", "2009 - 2014", "Professor", "Changsha"),
    scholar("chen-jie", "A", "Chen Jie", None, "Tsinghua University", "清华大学",
            "https://pim.tsinghua.example.cn/chenjie",
            ["precision measurement", "optical metrology"],
            "Tsinghua University", "PhD", "2002 - 2007", "Professor", "Beijing",
            dept_clause="Department of Precision Instrument, "),
    scholar("liu-yang", "A", "Liu Yang", None, "Shanghai Jiao Tong University",
            "上海交通大学", "https://naoe.sjtu.example.cn/liuyang",
            ["naval architecture", "hydrodynamics"],
            "Shanghai Jiao Tong University", "PhD", "2004 - 2009", "Professor",
            "Shanghai", dept_clause="School of Naval Architecture, "),
    scholar("huang-lei", "A", "Huang Lei", None, "Beihang University", "北京航空航天大学",
            "https://uav.buaa.example.cn/huanglei",
            ["flight control", "unmanned aerial vehicles"],
            "Beihang University", "PhD", "2007 - 2012", "Professor", "Beijing"),
    scholar("xu-bin", "A", "Xu Bin", None, "Harbin Institute of Technology",
            "哈尔滨工业大学", "https://robot.hit.example.cn/xubin",
            ["robotics", "mechanism design"],
            "Harbin Institute of Technology", "PhD", "2003 - 2008", "Professor",
            "Harbin"),
    # Tier B: native homepages with a romanized parenthetical; three English
    # news distractors each.
    scholar("zhao-gang", "B", "Zhao Gang", "赵刚", "Jilin University", "吉林大学",
            "https://phys.jlu.example.cn/zhaogang",
            ["光学晶体", "激光技术"], "吉林大学", "博士", "1998 - 2003", "教授",
            "Changchun"),
    scholar("sun-li", "B", "Sun Li", "孙丽", "Sichuan University", "四川大学",
            "https://water.scu.example.cn/sunli",
            ["水利工程", "泥沙运动"], "四川大学", "博士", "2001 - 2006", "教授",
            "Chengdu"),
    scholar("zhou-ming", "B", "Zhou Ming", "周明", "Wuhan University", "武汉大学",
            "https://rs.whu.example.cn/zhouming",
            ["遥感测绘", "地理信息系统"], "武汉大学", "博士", "2000 - 2005", "教授",
            "Wuhan"),
    scholar("wu-fang", "B", "Wu Fang", "吴芳", "Nanjing University", "南京大学",
            "https://sky.nju.example.cn/wufang",
            ["大气化学", "气溶胶"], "南京大学", "博士", "2003 - 2008", "教授",
            "Nanjing"),
    scholar("zheng-hao", "B", "Zheng Hao", "郑浩", "Xiamen University", "厦门大学",
            "https://ocean.xmu.example.cn/zhenghao",
            ["海洋生物学", "珊瑚礁生态"], "厦门大学", "博士", "2005 - 2010", "教授",
            "Xiamen"),
    scholar("feng-jian", "B", "Feng Jian", "冯健", "Shandong University", "山东大学",
            "https://sys.sdu.example.cn/fengjian",
            ["控制理论", "非线性系统"], "山东大学", "博士", "2002 - 2007", "教授",
            "Jinan"),
    # Tier C: native homepages without romanization, reachable only through the
    # email-augmented query plus native-name recovery.
    scholar("gao-yan", "C", "Gao Yan", "高燕", "Chinese Academy of Sciences",
            "中国科学院", "https://www.iccas-lab.example.cn/gaoyan",
            ["分析化学", "质谱成像"], "北京师范大学", "博士", "1999 - 2004", "研究员",
            "Beijing", email="gaoyan@iccas.example.cn",
            workplace="中国科学院化学研究所"),
    scholar("deng-tao", "C", "Deng Tao", "邓涛", "Dalian University of Technology",
            "大连理工大学", "https://energy.dlut.example.cn/dengtao",
            ["储能材料", "钠离子电池"], "中国科学技术大学", "博士", "2000 - 2005", "教授",
            "Dalian", email="dengtao@dlut.example.cn"),
    scholar("cui-ying", "C", "Cui Ying", "崔英", "Lanzhou University", "兰州大学",
            "https://grass.lzu.example.cn/cuiying",
            ["草地生态", "植被恢复"], "兰州大学", "博士", "2004 - 2009", "教授",
            "Lanzhou", email="cuiying@lzu.example.cn"),
    # Tier D: the mentions themselves are native script.
    scholar("chen-chao", "D", "Chen Chao", "陈超", "Tongji University", "同济大学",
            "https://bridge.tongji.example.cn/chenchao",
            ["桥梁工程", "结构抗震"], "同济大学", "博士", "1997 - 2002", "教授",
            "Shanghai"),
    scholar("yang-liu", "D", "Yang Liu", "杨柳", "Sun Yat-sen University", "中山大学",
            "https://med.sysu.example.cn/yangliu",
            ["肿瘤免疫", "细胞治疗"], "中山大学", "博士", "2006 - 2011", "教授",
            "Guangzhou"),
    scholar("he-ping", "D", "He Ping", "何平", "Huazhong University of Science and Technology",
            "华中科技大学", "https://oe.hust.example.cn/heping",
            ["光电子器件", "半导体激光"], "华中科技大学", "博士", "2001 - 2006", "教授",
            "Wuhan"),
    scholar("guo-jing", "D", "Guo Jing", "郭静", "Tianjin University", "天津大学",
            "https://chem.tju.example.cn/guojing",
            ["精细化工", "绿色合成"], "天津大学", "博士", "2003 - 2008", "教授",
            "Tianjin"),
]

BY_KEY = {s["key"]: s for s in SCHOLARS}

GHOST_NAME = "Mo, Xuanyu"
GHOST_AFFILIATION = "Unlisted Polytechnic, Atlantis"
GHOST_INST_ZH = "乌有理工学院"

A1_METADATA = ("Vortex pinning and critical currents in layered superconductors. "
               "We report transport measurements on bilayer films under varying "
               "field orientation.")
A1_AREA_ZH = ["超导物理"]


def raw_name(s):
    if s["tier"] == "D":
        return s["native"]
    surname, given = s["pinyin"].split(" ", 1)
    return f"{surname}, {given}"


def plain_affiliation(s):
    if s["tier"] == "D":
        return s["inst_zh"]
    if s["key"] == "gao-yan":
        return "Institute of Chemistry, Chinese Academy of Sciences, Beijing, China"
    return f"{s['inst_en']}, {s['city']}, China"


# (id, scholar key or None, affiliation override, email, origin, source, metadata)
MENTIONS = [
    ("wang-wei-fd", "wang-wei-fd", None, None, "paper_author", "paper-101", A1_METADATA),
    ("wang-wei-zj", "wang-wei-zj", None, None, "paper_author", "paper-102", None),
    ("li-na-nk", "li-na-nk", None, None, "paper_author", "paper-103", None),
    ("li-na-cs", "li-na-cs", None, None, "paper_author", "paper-104", None),
    ("chen-jie", "chen-jie",
     "Department of Precision Instrument, Tsinghua University, Beijing, China",
     None, "paper_author", "paper-105", None),
    ("chen-jie-award", "chen-jie", "Tsinghua University, Beijing, China",
     None, "award_recipient", "award-201", None),
    ("liu-yang", "liu-yang",
     "School of Naval Architecture, Shanghai Jiao Tong University, Shanghai, China",
     None, "paper_author", "paper-106", None),
    ("liu-yang-award", "liu-yang", "Shanghai Jiao Tong University, Shanghai, China",
     None, "award_recipient", "award-202", None),
    ("huang-lei", "huang-lei", None, None, "paper_author", "paper-107", None),
    ("xu-bin", "xu-bin", None, None, "paper_author", "paper-108", None),
    ("zhao-gang", "zhao-gang", None, None, "paper_author", "paper-109", None),
    ("zhao-gang-award", "zhao-gang", "College of Physics, Jilin University, Changchun, China",
     None, "award_recipient", "award-203", None),
    ("sun-li", "sun-li", None, None, "paper_author", "paper-110", None),
    ("zhou-ming", "zhou-ming", None, None, "paper_author", "paper-111", None),
    ("wu-fang", "wu-fang", None, None, "paper_author", "paper-112", None),
    ("zheng-hao", "zheng-hao", None, None, "paper_author", "paper-113", None),
    ("feng-jian", "feng-jian", None, None, "paper_author", "paper-114", None),
    ("gao-yan", "gao-yan", None, "gaoyan@iccas.example.cn", "paper_author", "paper-115", None),
    ("deng-tao", "deng-tao", None, "dengtao@dlut.example.cn", "paper_author", "paper-116", None),
    ("cui-ying", "cui-ying", None, "cuiying@lzu.example.cn", "paper_author", "paper-117", None),
    ("chen-chao", "chen-chao", None, None, "paper_author", "paper-118", None),
    ("yang-liu", "yang-liu", None, None, "paper_author", "paper-119", None),
    ("he-ping", "he-ping", None, None, "paper_author", "paper-120", None),
    ("guo-jing", "guo-jing", None, None, "paper_author", "paper-121", None),
    ("mo-xuanyu", None, GHOST_AFFILIATION, None, "paper_author", "paper-122", None),
]

SAME_AS = {"chen-jie": "chen-jie-award", "liu-yang": "liu-yang-award",
           "zhao-gang": "zhao-gang-award"}


def mention_record(mid, skey, affil, email, origin, source, metadata):
    s = BY_KEY.get(skey)
    rec = {
        "raw_name": raw_name(s) if s else GHOST_NAME,
        "affiliation": affil or (plain_affiliation(s) if s else GHOST_AFFILIATION),
        "origin": origin,
        "source_id": source,
    }
    if email:
        rec["email"] = email
    if metadata:
        rec["paper_metadata"] = metadata
    return rec


# ---------------------------------------------------------------------------
# Pages


def html(title, paragraphs):
    body = "\n".join(f"<p>{p}</p>" for p in paragraphs)
    return (f"<!doctype html>\n<html>\n<head><title>{title}</title></head>\n"
            f"<body>\n<h1>{title}</h1>\n{body}\n</body>\n</html>\n")


def en_home(s):
    return html(
        s["pinyin"],
        [f"{s['title']}, {s['dept_clause']}{s['inst_en']}, {s['city']}, China.",
         f"Research interests: {s['kw'][0]}; {s['kw'][1]}.",
         f"Education: {s['edu_degree']}, {s['edu_school']}, {s['edu_years']}.",
         "Office hours by appointment during the teaching term."])


def zh_home_b(s):
    return html(
        f"{s['native']} ({s['pinyin']})",
        [f"{s['native']}，{s['inst_zh']}{s['title']}。",
         f"研究方向：{s['kw'][0]}；{s['kw'][1]}。",
         f"教育经历：{s['edu_school']}{s['edu_degree']}（{s['edu_years']}）。",
         "实验室长期招收研究生，欢迎联系。"])


def zh_home_c(s):
    return html(
        s["native"],
        [f"{s['native']}，{s['workplace']}{s['title']}。",
         f"研究方向：{s['kw'][0]}；{s['kw'][1]}。",
         f"教育经历：{s['edu_school']}{s['edu_degree']}（{s['edu_years']}）。",
         f"联系方式：{s['email']}"])


def zh_home_d(s):
    return html(
        s["native"],
        [f"{s['native']}，{s['inst_zh']}{s['title']}。",
         f"研究方向：{s['kw'][0]}；{s['kw'][1]}。",
         f"教育经历：{s['edu_school']}{s['edu_degree']}（{s['edu_years']}）。",
         "近年主持多项在研项目，成果发表于领域内主要期刊。"])


def media_page(s, i):
    return html(
        f"{s['inst_en']} research briefing {i}",
        [f"{s['inst_en']} announced a new round of laboratory funding this week. "
         f"Team leads including {s['pinyin']} presented project updates to the council.",
         "The committee thanked all campus participants for attending the session."])


def conf_page(i):
    attendees = ", ".join(BY_KEY[k]["pinyin"] for k in ("gao-yan", "deng-tao", "cui-ying"))
    return html(
        f"International Measurement Symposium, session {i}",
        [f"Attendees: {attendees}, and colleagues discussed calibration standards.",
         "The session chairs opened the floor for questions after each talk."])


def news_page():
    return html(
        "National laureates announced",
        ["Honorees include Wang Wei of Fudan University, Li Na of Nankai University, "
         "and Chen Jie of Tsinghua University.",
         "The award ceremony will be held on the main campus next spring."])


def build_pages():
    """Returns list of (url, file, language, html, owner_key_or_None, biographical)."""
    pages = []
    for s in SCHOLARS:
        fname = s["key"].replace("-", "_") + ".html"
        if s["tier"] == "A":
            pages.append((s["home"], fname, "en", en_home(s), s["key"], True))
        elif s["tier"] == "B":
            pages.append((s["home"], fname, "zh", zh_home_b(s), s["key"], True))
            host = s["home"].split("/")[2].split(".", 1)[1]  # e.g. jlu.example.cn
            for i in (1, 2, 3):
                url = f"https://media.{host}/item{i}"
                pages.append((url, f"media_{s['key'].replace('-', '_')}_{i}.html",
                              "en", media_page(s, i), None, False))
        elif s["tier"] == "C":
            pages.append((s["home"], fname, "zh", zh_home_c(s), s["key"], True))
        else:
            pages.append((s["home"], fname, "zh", zh_home_d(s), s["key"], True))
    for i, label in enumerate("abc", start=1):
        pages.append((f"https://conf-{label}.example.org/roster", f"conf_{label}.html",
                      "en", conf_page(i), None, False))
    pages.append(("https://awards.example.org/laureates", "news_awards.html",
                  "en", news_page(), None, False))
    return pages


# ---------------------------------------------------------------------------
# Scripted model responses


def profile_json(s):
    return {
        "name": s["pinyin"] if s["tier"] == "A" else s["native"],
        "workplace": s["workplace"],
        "email": [s["email"]] if s["email"] else [],
        "keywords": s["kw"],
        "education_track": [{"fromto": s["edu_years"], "school": s["edu_school"],
                             "major": "null", "scholar": s["edu_degree"]}],
        "professional_track": [{"fromto": "null", "agency": s["workplace"],
                                "title": s["title"]}],
        "honor_track": [],
    }


def build_stub(pages):
    stub = {}
    for url, _file, _lang, _html, owner, bio in pages:
        stub[f"filter_biographical|{url}"] = {"biographical": bio}
    # Target confirmation over the full page x mention cross product, so the
    # script never has to predict which pages a query will rank.
    for url, _file, _lang, _html, owner, bio in pages:
        for mid, skey, affil, email, origin, source, metadata in MENTIONS:
            rec = mention_record(mid, skey, affil, email, origin, source, metadata)
            key = f"filter_target_match|{url}|{rec['raw_name']}|{rec['affiliation']}"
            stub[key] = {"match": owner is not None and owner == skey}
    for s in SCHOLARS:
        stub[f"extract_profile|{s['home']}"] = profile_json(s)
    # Native-name recovery: plain evidence only reveals names printed beside
    # romanization (tier B); the email-augmented call also reaches tier C pages.
    for s in SCHOLARS:
        if s["tier"] == "D":
            continue
        plain = [s["native"]] if s["tier"] == "B" else []
        stub[f"native_name|{raw_name(s)}|"] = {"candidates": plain}
        if s["email"]:
            stub[f"native_name|{raw_name(s)}|{s['email']}"] = {"candidates": [s["native"]]}
    stub[f"native_name|{GHOST_NAME}|"] = {"candidates": []}
    stub[f"translate_institution|Unlisted Polytechnic"] = {"translation": GHOST_INST_ZH}
    stub[f"identify_research_area|{A1_METADATA}|zh"] = {"keywords": A1_AREA_ZH}
    return stub


# ---------------------------------------------------------------------------
# Decision pairs: 15 decidable comparisons with hand-computed outcomes.
# Verdicts at threshold 7 — institution 2, matched segment 3 each, keyword
# tiers exact 4 / proper token subset 3 / shared token 2.


def prof(name, workplace, kw, edu=(), pro=()):
    return {
        "name": name, "workplace": workplace, "email": [], "keywords": list(kw),
        "education_track": [{"fromto": y, "school": sc, "major": "null", "scholar": d}
                            for (sc, d, y) in edu],
        "professional_track": [{"fromto": y, "agency": ag, "title": t}
                               for (ag, t, y) in pro],
        "honor_track": [],
    }


PAIRS = [
    # id, a, b, gold_same  (comment: expected score -> verdict, correct?)
    ("p01-identical",  # 2+3+8=13 same, correct
     prof("张益慧", "清华大学", ["柔性电子", "软物质力学"], [("清华大学", "博士", "2006 - 2011")]),
     prof("张益慧", "清华大学", ["柔性电子", "软物质力学"], [("清华大学", "博士", "2006 - 2011")]),
     True),
    ("p02-bilingual",  # 2+3+4=9 same, correct
     prof("Zhang Yihui", "Tsinghua University", ["flexible electronics", "soft matter mechanics"],
          [("Northwestern University", "PhD", "2008 - 2012")]),
     prof("张益慧", "清华大学", ["flexible electronics", "力学行为"],
          [("Northwestern University", "PhD", "2008 - 2012")]),
     True),
    ("p03-homonym",  # 0 different, correct
     prof("Wang Wei", "Fudan University", ["superconductivity", "vortex dynamics"],
          [("Nanjing University", "PhD", "2005 - 2010")]),
     prof("Wang Wei", "Zhejiang University", ["computer vision", "image segmentation"],
          [("Zhejiang University", "PhD", "2008 - 2013")]),
     False),
    ("p04-moved",  # 0+3+(4+3)=10 same, correct
     prof("Wang Wei", "Fudan University", ["superconductivity", "vortex pinning"],
          [("Nanjing University", "PhD", "2005 - 2010")]),
     prof("Wang Wei", "Nanjing University", ["superconductivity", "vortex pinning dynamics"],
          [("Nanjing University", "PhD", "2005 - 2010")]),
     True),
    ("p05-sparse",  # 2 different, but same person: the one missed merge
     prof("王芳", "复旦大学", ["量子光学"]),
     prof("Wang Fang", "Fudan University", ["quantum optics"]),
     True),
    ("p06-doppelganger",  # 2+3+4=9 same, but different people: the one bad merge
     prof("李娜", "中南大学", ["合金设计", "粉末冶金"], [("中南大学", "博士", "2009 - 2014")]),
     prof("李娜", "中南大学", ["合金设计", "腐蚀防护"], [("中南大学", "博士", "2010 - 2015")]),
     False),
    ("p07-disjoint",  # 0 different, correct
     prof("陈超", "同济大学", ["桥梁工程", "结构抗震"], [("同济大学", "博士", "1997 - 2002")]),
     prof("孙丽", "四川大学", ["水利工程", "泥沙运动"], [("四川大学", "博士", "2001 - 2006")]),
     False),
    ("p08-boundary",  # 2+3+2=7, exactly at threshold: same, correct
     prof("赵刚", "吉林大学", ["polymer processing", "光学晶体"],
          [("吉林大学", "博士", "1998 - 2003")]),
     prof("Zhao Gang", "Jilin University", ["polymer physics", "激光技术"],
          [("吉林大学", "博士", "1998 - 2003")]),
     True),
    ("p09-colleagues",  # 2 different, correct
     prof("Xu Bin", "Harbin Institute of Technology", ["robotics", "mechanism design"],
          [("Harbin Institute of Technology", "PhD", "2003 - 2008")]),
     prof("Tian Yu", "Harbin Institute of Technology",
          ["welding metallurgy", "additive manufacturing"],
          [("Beihang University", "PhD", "1999 - 2004")]),
     False),
    ("p10-field-twins",  # 4 different, correct
     prof("Han Xue", "National University of Defense Technology",
          ["machine learning", "optimization methods"],
          [("National University of Defense Technology", "博士", "2010 - 2015")]),
     prof("Qin Yue", "Renmin University of China", ["machine learning", "causal inference"],
          [("Renmin University of China", "PhD", "2011 - 2016")]),
     False),
    ("p11-two-careers",  # 2+6+0=8 same, correct
     prof("赵刚", "吉林大学", ["光学晶体"], [("吉林大学", "博士", "1998 - 2003")],
          [("吉林大学", "教授", "2010 - present")]),
     prof("Zhao Gang", "Jilin University", ["laser crystals"],
          [("吉林大学", "博士", "1998 - 2003")], [("Jilin University", "教授", "2012 - present")]),
     True),
    ("p12-classmates",  # 0+3+2=5 different, correct
     prof("吴芳", "南京大学", ["aerosol chemistry"], [("南京大学", "博士", "2003 - 2008")]),
     prof("许岚", "中国科学院", ["aerosol optics"], [("南京大学", "博士", "2003 - 2008")]),
     False),
    ("p13-enriched",  # 2+3+4=9 same, correct
     prof("杨柳", "中山大学", ["肿瘤免疫", "细胞治疗"], [("中山大学", "博士", "2006 - 2011")]),
     prof("杨柳", "中山大学", ["肿瘤免疫"], [("中山大学", "博士", "2006 - 2011")],
          [("中山大学", "教授", "null")]),
     True),
    ("p14-shared-token",  # 2+0+2=4 different, correct
     prof("Wang Wei", "浙江大学", ["image segmentation", "computer vision"],
          [("Zhejiang University", "PhD", "2008 - 2013")]),
     prof("Song Rui", "Zhejiang University", ["point cloud segmentation", "robot navigation"],
          [("Southeast University", "PhD", "2009 - 2014")]),
     False),
    ("p15-minimal-same",  # 2+3+4=9 same, correct
     prof("郭静", "天津大学", ["精细化工", "绿色合成"], [("天津大学", "博士", "2003 - 2008")]),
     prof("郭静", "天津大学", ["精细化工"], [("天津大学", "博士", "2003 - 2008")]),
     True),
]


# ---------------------------------------------------------------------------
# Emission


def jd(obj):
    return json.dumps(obj, ensure_ascii=False, sort_keys=False)


def check_invariants(pages):
    urls = [p[0] for p in pages]
    assert len(urls) == len(set(urls)), "duplicate page url"
    # Tier C gating: on a tie, conference rosters must outrank the homepage.
    conf_urls = sorted(u for u in urls if "conf-" in u)
    for s in SCHOLARS:
        if s["tier"] != "C":
            continue
        assert all(c < s["home"] for c in conf_urls), f"tie-break order broken for {s['key']}"
        page = next(p for p in pages if p[0] == s["home"])
        assert s["pinyin"].lower() not in page[3].lower(), f"{s['key']} page leaks romanization"
        assert s["email"] in page[3], f"{s['key']} page must carry the email"
    # Tier B homepages must not mention the English institution name.
    for s in SCHOLARS:
        if s["tier"] != "B":
            continue
        page = next(p for p in pages if p[0] == s["home"])
        assert s["inst_en"].lower() not in page[3].lower(), f"{s['key']} page leaks English name"
    ids = [m[0] for m in MENTIONS]
    assert len(ids) == len(set(ids)), "duplicate mention id"
    assert len(PAIRS) == 15


def main():
    pages = build_pages()
    check_invariants(pages)

    corpus = ROOT / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    manifest = {"documents": []}
    for url, fname, lang, content, _owner, _bio in pages:
        (corpus / fname).write_text(content, encoding="utf-8")
        title = content.split("<title>")[1].split("</title>")[0]
        manifest["documents"].append({"url": url, "file": fname, "title": title,
                                      "language": lang})
    (corpus / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")

    stub_dir = ROOT / "stub"
    stub_dir.mkdir(parents=True, exist_ok=True)
    (stub_dir / "responses.json").write_text(
        json.dumps(build_stub(pages), ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8")

    datasets = ROOT / "datasets"
    datasets.mkdir(parents=True, exist_ok=True)

    mention_lines = []
    labeled_lines = [jd({"dataset": "offline-e2e",
                         "description": "25 mentions over 21 scholars, one unresolvable"})]
    for mid, skey, affil, email, origin, source, metadata in MENTIONS:
        rec = mention_record(mid, skey, affil, email, origin, source, metadata)
        mention_lines.append(jd({"id": mid, **rec}))
        s = BY_KEY.get(skey)
        gold = {"profile_found": s is not None}
        if s is not None:
            gold["workplace"] = s["workplace"]
            if s["tier"] in ("B", "C"):
                gold["native_name"] = s["native"]
        partner = SAME_AS.get(mid) or next((k for k, v in SAME_AS.items() if v == mid), None)
        if partner:
            gold["same_as"] = partner
        labeled_lines.append(jd({"id": mid, "mention": rec, "gold": gold}))
    (datasets / "mentions.jsonl").write_text("\n".join(mention_lines) + "\n", encoding="utf-8")
    (datasets / "labeled.jsonl").write_text("\n".join(labeled_lines) + "\n", encoding="utf-8")

    pair_lines = [jd({"dataset": "pairs15",
                      "description": "15 decidable profile pairs, 13 scored correctly at 7"})]
    for pid, a, b, same in PAIRS:
        pair_lines.append(jd({"id": pid, "a": a, "b": b, "same": same}))
    (datasets / "pairs15.jsonl").write_text("\n".join(pair_lines) + "\n", encoding="utf-8")

    config_dir = ROOT / "config"
    config_dir.mkdir(parents=True, exist_ok=True)
    config = {
        "backend": "fixture",
        "provider": "stub",
        "plan": "full",
        "k": 3,
        "max_retries": 2,
        "threshold": 7,
        "workers": 4,
        "seed": 7,
        "paths": {
            "prompts": "../../data/prompts/manifest.json",
            "pinyin_table": "../../data/pinyin_table.tsv",
            "surnames": "../../data/surnames.txt",
            "institutions": "../../data/institutions.tsv",
            "out_dir": "out",
        },
        "backends": [{"name": "fixture", "kind": "fixture", "corpus": "../corpus"}],
        "providers": [{"name": "stub", "kind": "stub", "script": "../stub/responses.json"}],
    }
    (config_dir / "fixture.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8")

    print(f"pages: {len(pages)}, mentions: {len(MENTIONS)}, pairs: {len(PAIRS)}")


if __name__ == "__main__":
    main()
