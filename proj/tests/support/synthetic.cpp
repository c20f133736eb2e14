#include "synthetic.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "ape/rng.hpp"

namespace ape::testing {

namespace {

std::string first_form(const std::vector<NumeralEntry> &entries, int value) {
  for (const auto &e : entries) {
    if (e.value == value) return e.surface;
  }
  throw std::logic_error("numeral lexicon has no form for " + std::to_string(value));
}

class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}

  int between(int lo, int hi) { return lo + static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(hi - lo + 1))); }

  template <typename T>
  const T &one_of(const std::vector<T> &v) {
    return v[uniform_below(rng_, v.size())];
  }

  bool chance(double p) { return uniform01(rng_) < p; }

 private:
  std::mt19937_64 rng_;
};

const std::vector<std::string> kCities = {"תל אביב", "חיפה", "באר שבע", "נצרת", "ירושלים", "לוד"};
const std::vector<std::string> kOffenses = {"גניבה",       "התפרצות לדירה", "תקיפה הגורמת חבלה", "החזקת סם",
                                            "קבלת דבר במרמה", "שוד",          "איומים",           "הונאה"};
const std::vector<std::string> kPriorVerbs = {"נגזרו", "הוטלו", "נגזר"};
const std::vector<std::string> kPriorCourts = {"בת\"פ", "בע\"פ", "ברע\"פ"};

std::string docket(Picker &p) { return std::to_string(p.between(100, 9999)) + "/" + std::to_string(p.between(10, 22)); }

std::string filler(Picker &p) {
  switch (p.between(0, 11)) {
    case 0: return "הנאשם הורשע על פי הודאתו בעבירות של " + p.one_of(kOffenses) + ".";
    case 1: return "בית המשפט שמע את טיעוני הצדדים לעונש.";
    case 2: return "לנאשם עבר פלילי הכולל " + std::to_string(p.between(2, 9)) + " הרשעות קודמות.";
    case 3: return "שירות המבחן הגיש תסקיר בעניינו של הנאשם.";
    case 4: return "יש להביא בחשבון את נסיבותיו האישיות של הנאשם ואת הודאתו.";
    case 5: return "המתלוננת העידה כי נגרם לה נזק רב.";
    case 6: return "הנאשם הביע חרטה על מעשיו ונטל אחריות.";
    case 7: return "העבירות בוצעו בשנת " + std::to_string(p.between(2005, 2020)) + " בעיר " + p.one_of(kCities) + ".";
    case 8: return "מתחם העונש ההולם נקבע בהתחשב בערך החברתי שנפגע.";
    case 9: return "הנאשם נשוי ואב לשלושה ילדים.";
    case 10: return "נסיבות ביצוע העבירה מלמדות על תכנון מוקדם.";
    default: return "עוד יש לשקול את הצורך בהרתעת היחיד והרבים.";
  }
}

std::string prosecution(Picker &p) {
  if (p.chance(0.5)) {
    return "ב\"כ המאשימה ביקשה להטיל על הנאשם " + std::to_string(p.between(12, 72)) + " חודשי מאסר בפועל.";
  }
  return "המאשימה עתרה לעונש של " + std::to_string(p.between(2, 6)) + " שנות מאסר בפועל וקנס.";
}

std::string defense(Picker &p) {
  if (p.chance(0.5)) {
    return "ב\"כ הנאשם ביקש להסתפק בעונש של " + std::to_string(p.between(3, 9)) +
           " חודשי מאסר שירוצו בעבודות שירות.";
  }
  return "ההגנה טענה כי אין מקום למאסר ממושך.";
}

std::string prior_case(Picker &p) {
  const std::string verb = p.one_of(kPriorVerbs);
  switch (p.between(0, 2)) {
    case 0:
      return p.one_of(kPriorCourts) + " " + docket(p) + " " + verb + " על הנאשם " + std::to_string(p.between(6, 48)) +
             " חודשי מאסר בפועל.";
    case 1:
      return "כך למשל " + p.one_of(kPriorCourts) + " " + docket(p) + " פלוני נ' מדינת ישראל " + verb +
             " על המערער " + std::to_string(p.between(6, 48)) + " חודשי מאסר.";
    default:
      return "בעבר " + verb + " על הנאשם " + std::to_string(p.between(2, 5)) + " שנות מאסר בגין עבירות דומות.";
  }
}

std::string probation(Picker &p) {
  return "מאסר על תנאי של " + std::to_string(p.between(4, 18)) +
         " חודשים, והתנאי הוא שהנאשם לא יעבור עבירה מסוג פשע במשך " + std::to_string(p.between(2, 3)) +
         " שנים מיום שחרורו.";
}

std::string fine(Picker &p) {
  if (p.chance(0.5)) {
    return "קנס בסך " + std::to_string(p.between(1, 20)) + ",000 ש\"ח או " + std::to_string(p.between(10, 90)) +
           " ימי מאסר תמורתו.";
  }
  return "הקנס ישולם ב-" + std::to_string(p.between(2, 12)) + " תשלומים, ובאין תשלום ירצה הנאשם מאסר תמורתו.";
}

std::string procedural(Picker &p) {
  if (p.chance(0.5)) return "המאסר בפועל יחל ב-" + std::to_string(p.between(1, 31)) + ".";
  return "הנאשם יתייצב לריצוי מאסרו בבית המעצר ניצן ב-" + std::to_string(p.between(1, 28)) + ".";
}

std::string closing(Picker &p) {
  if (p.chance(0.5)) return "זכות ערעור לבית המשפט העליון תוך 45 ימים.";
  return "ניתן היום בנוכחות הצדדים.";
}

const std::string kWorkedExample =
    "אנו גוזרים על הנאשם את העונש הבא: 48 חודשי מאסר, מתוכם ירצה הנאשם 30 חודשי מאסר בפועל והיתר, 18 חודשים, "
    "יהיו מאסר על תנאי (ת\"פ 1124/04).";

struct Gold {
  std::string sentence;
  int months = 0;
  std::string kind;
};

Gold gold_sentence(Picker &p, const NumeralLexicon &numerals) {
  const std::vector<std::string> openers = {"אנו גוזרים על הנאשם", "לאור כל האמור, אנו גוזרים על הנאשם",
                                            "אשר על כן אני גוזר על הנאשם", "אנו מטילים על הנאשם"};
  const std::string open = p.one_of(openers);
  switch (p.between(0, 7)) {
    case 0: {
      const int n = p.between(2, 96);
      return {open + " " + std::to_string(n) + " חודשי מאסר בפועל.", n, "digits_months"};
    }
    case 1: {
      const int n = p.between(3, 60);
      return {open + " " + render_number(n, numerals) + " חודשי מאסר בפועל.", n, "words_months"};
    }
    case 2: {
      const int n = p.between(2, 12);
      return {open + " " + std::to_string(n) + " שנות מאסר בפועל.", 12 * n, "digits_years"};
    }
    case 3: return {open + " שנתיים מאסר בפועל.", 24, "dual_years"};
    case 4: {
      const int n = p.between(1, 8);
      return {open + " " + std::to_string(n) + " שנים וחצי מאסר בפועל.", 12 * n + 6, "half_years"};
    }
    case 5: return {open + " שנת מאסר בפועל.", 12, "unit_only_year"};
    case 6: {
      const int n = p.between(4, 40);
      return {"אני גוזר על הנאשם את העונשים הבאים: " + std::to_string(n) + " חודשי מאסר בפועל, בניכוי ימי מעצרו.",
              n, "digits_months_detention"};
    }
    default: {
      const int x = p.between(6, 60);
      const int y = p.between(6, 36);
      return {open + " " + std::to_string(x + y) + " חודשי מאסר, מתוכם ירצה הנאשם " + std::to_string(x) +
                  " חודשי מאסר בפועל והיתר, " + std::to_string(y) + " חודשים, יהיו מאסר על תנאי.",
              x, "decomposition"};
    }
  }
}

}  // namespace

std::string render_number(int value, const NumeralLexicon &numerals) {
  if (value < 1 || value > 999) throw std::out_of_range("render_number: value outside 1..999");
  std::vector<std::string> parts;
  if (value >= 100) parts.push_back(first_form(numerals.hundreds, value / 100 * 100));
  const int rest = value % 100;
  if (rest >= 11 && rest <= 19) {
    parts.push_back(first_form(numerals.teens, rest));
  } else {
    if (rest >= 20) parts.push_back(first_form(numerals.tens, rest / 10 * 10));
    const int unit = rest >= 20 ? rest % 10 : rest;
    if (unit > 0) parts.push_back(first_form(numerals.units, unit));
  }
  if (parts.size() >= 2) parts.back() = numerals.conjunctions.front() + parts.back();
  std::string out;
  for (const auto &part : parts) out += (out.empty() ? "" : " ") + part;
  return out;
}

std::string SyntheticCorpus::text(const SyntheticDecision &d) const {
  std::string out;
  for (const auto &s : d.sentences) out += (out.empty() ? "" : " ") + s;
  return out + "\n";
}

std::vector<AnnotationRecord> SyntheticCorpus::annotations() const {
  std::vector<AnnotationRecord> out;
  for (const auto &d : decisions) {
    for (int i = 0; i < static_cast<int>(d.sentences.size()); ++i) {
      AnnotationRecord r{d.case_id, i, i == d.gold_index, std::nullopt};
      if (r.is_punishment) r.months = d.gold_months;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<Decision> SyntheticCorpus::to_decisions() const {
  std::vector<Decision> out;
  for (const auto &d : decisions) {
    out.push_back(Decision{d.case_id, d.year, d.court, text(d), segment_sentences(text(d))});
  }
  return out;
}

SyntheticCorpus make_synthetic_corpus(const NumeralLexicon &numerals, int num_decisions, std::uint64_t seed) {
  SyntheticCorpus corpus;
  for (int k = 0; k < num_decisions; ++k) {
    Picker p(derive_seed(seed, static_cast<std::uint64_t>(k)));
    SyntheticDecision d;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%03d", k + 1);
    d.case_id = id;
    d.filename = d.case_id + ".txt";
    d.year = p.between(2010, 2020);
    d.court = "בית המשפט המחוזי ב" + p.one_of(kCities);

    const int total = p.between(30, 80);
    std::vector<std::string> tail;
    tail.push_back(probation(p));
    if (p.chance(0.8)) tail.push_back(fine(p));
    if (p.chance(0.7)) tail.push_back(procedural(p));
    tail.push_back(closing(p));

    std::vector<std::string> head;
    head.push_back(d.court + ".");
    head.push_back(prosecution(p));
    head.push_back(defense(p));
    const int priors = p.between(1, 3);
    for (int i = 0; i < priors; ++i) head.push_back(prior_case(p));
    if (p.chance(0.5)) head.push_back(fine(p));
    if (p.chance(0.4)) head.push_back(probation(p));

    const int fillers = total - static_cast<int>(head.size() + tail.size()) - 1;
    // Distractors are spread through the filler prose in a random order.
    std::vector<std::string> body;
    for (int i = 0; i < fillers; ++i) body.push_back(filler(p));
    for (std::size_t i = 1; i < head.size(); ++i) {
      const auto at = static_cast<std::size_t>(p.between(0, static_cast<int>(body.size())));
      body.insert(body.begin() + static_cast<std::ptrdiff_t>(at), head[i]);
    }
    d.sentences.push_back(head[0]);
    d.sentences.insert(d.sentences.end(), body.begin(), body.end());
    const Gold g = k == 0 ? Gold{kWorkedExample, 30, "worked_example"} : gold_sentence(p, numerals);
    d.gold_index = static_cast<int>(d.sentences.size());
    d.gold_months = g.months;
    d.gold_template = g.kind;
    d.sentences.push_back(g.sentence);
    d.sentences.insert(d.sentences.end(), tail.begin(), tail.end());
    corpus.decisions.push_back(std::move(d));
  }
  return corpus;
}

void write_synthetic_corpus(const SyntheticCorpus &corpus, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json meta = nlohmann::ordered_json::array();
  for (const auto &d : corpus.decisions) {
    std::ofstream(dir / d.filename, std::ios::binary) << corpus.text(d);
    meta.push_back({{"filename", d.filename}, {"case_id", d.case_id}, {"year", d.year}, {"court", d.court}});
  }
  std::ofstream(dir / "metadata.json", std::ios::binary) << meta.dump(2) << "\n";
  std::ofstream ann(dir / "annotations.jsonl", std::ios::binary);
  for (const auto &r : corpus.annotations()) {
    nlohmann::ordered_json j{{"case_id", r.case_id}, {"sentence_index", r.sentence_index},
                             {"is_punishment", r.is_punishment}};
    if (r.months) j["months"] = *r.months;
    ann << j.dump() << "\n";
  }
}

}  // namespace ape::testing
