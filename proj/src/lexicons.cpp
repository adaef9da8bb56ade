#include "mateval/corpus/lexicons.hpp"

#include <fstream>

#include <json.hpp>

#include "mateval/errors.hpp"

namespace mateval::corpus {

namespace {

std::map<std::string, std::string> mirrored(
    std::initializer_list<std::pair<const char*, const char*>> pairs) {
    std::map<std::string, std::string> m;
    for (const auto& [a, b] : pairs) {
        m[a] = b;
        m[b] = a;
    }
    return m;
}

Lexicons make_english() {
    Lexicons lex;
    lex.antonyms = mirrored({
        {"happy", "sad"},       {"big", "small"},     {"good", "bad"},
        {"hot", "cold"},        {"day", "night"},     {"light", "dark"},
        {"fast", "slow"},       {"old", "young"},     {"open", "closed"},
        {"love", "hate"},       {"loved", "hated"},   {"always", "never"},
        {"early", "late"},      {"rich", "poor"},     {"strong", "weak"},
        {"tall", "short"},      {"warm", "cool"},     {"first", "last"},
        {"full", "empty"},      {"hard", "soft"},     {"high", "low"},
        {"loud", "quiet"},      {"near", "far"},      {"new", "ancient"},
        {"clean", "dirty"},     {"safe", "dangerous"},{"bright", "dim"},
        {"beautiful", "ugly"},  {"best", "worst"},    {"begin", "finish"},
        {"remember", "forget"}, {"win", "lose"},      {"won", "lost"},
        {"laugh", "cry"},       {"laughed", "cried"}, {"smiled", "frowned"},
    });
    lex.negations = {
        {"is", "is not"},         {"was", "was not"},
        {"are", "are not"},       {"were", "were not"},
        {"has", "has not"},       {"have", "have not"},
        {"had", "had not"},       {"can", "cannot"},
        {"could", "could not"},   {"will", "will not"},
        {"would", "would not"},   {"did", "did not"},
        {"does", "does not"},     {"do", "do not"},
        {"should", "should not"}, {"must", "must not"},
    };
    lex.pronoun_swaps = {
        {"he", "she"},           {"she", "he"},
        {"him", "her"},          {"her", "him"},
        {"his", "her"},          {"hers", "his"},
        {"himself", "herself"},  {"herself", "himself"},
        {"they", "he"},          {"them", "him"},
        {"their", "his"},        {"theirs", "his"},
        {"we", "they"},          {"us", "them"},
        {"our", "their"},        {"everyone", "no one"},
        {"everybody", "nobody"}, {"nobody", "everybody"},
        {"all", "none"},         {"none", "all"},
        {"many", "few"},         {"few", "many"},
        {"most", "least"},       {"some", "every"},
        {"both", "neither"},     {"each", "neither"},
        {"any", "no"},           {"every", "some"},
    };
    lex.fact_flips = {
        {"sun", "moon"},          {"moon", "sun"},
        {"summer", "winter"},     {"winter", "summer"},
        {"spring", "autumn"},     {"autumn", "spring"},
        {"north", "south"},       {"south", "north"},
        {"east", "west"},         {"west", "east"},
        {"morning", "midnight"},  {"sunrise", "sunset"},
        {"sunset", "sunrise"},    {"monday", "friday"},
        {"friday", "monday"},     {"sunday", "wednesday"},
        {"water", "sand"},        {"rain", "snow"},
        {"snow", "rain"},         {"ocean", "desert"},
        {"desert", "ocean"},      {"mountain", "valley"},
        {"one", "nine"},          {"two", "seven"},
        {"three", "eight"},       {"four", "eleven"},
        {"five", "twelve"},       {"six", "thirteen"},
        {"seven", "two"},         {"eight", "three"},
        {"nine", "four"},         {"ten", "forty"},
        {"hundred", "thousand"},  {"thousand", "hundred"},
        {"january", "july"},      {"december", "june"},
        {"christmas", "easter"},  {"breakfast", "dinner"},
        {"dinner", "breakfast"},
    };
    lex.off_topic = {
        "The quarterly sales figures were filed with the regional office on "
        "schedule.",
        "Instructions for assembling the bookshelf are printed on the side "
        "of the box.",
        "Photosynthesis converts sunlight into chemical energy inside plant "
        "cells.",
        "The committee postponed the zoning hearing until the following "
        "quarter.",
        "A standard chess board has sixty-four squares in an eight by eight "
        "grid.",
        "The ferry timetable changes twice a year with the daylight hours.",
        "Routine maintenance keeps the turbine bearings within tolerance.",
        "The museum extended its opening hours for the holiday season.",
    };
    return lex;
}

Lexicons make_chinese() {
    Lexicons lex;
    lex.antonyms = mirrored({
        {"高", "低"}, {"大", "小"}, {"快", "慢"}, {"多", "少"},
        {"好", "坏"}, {"新", "旧"}, {"开心", "难过"}, {"白天", "夜晚"},
        {"喜欢", "讨厌"}, {"强", "弱"},
    });
    lex.negations = {
        {"是", "不是"}, {"有", "没有"}, {"会", "不会"},
        {"能", "不能"}, {"要", "不要"},
    };
    lex.pronoun_swaps = {
        {"他", "她"}, {"她", "他"}, {"他们", "她们"}, {"她们", "他们"},
        {"我们", "他们"}, {"大家", "没有人"}, {"都", "全不"},
        {"每个", "没有"},
    };
    lex.fact_flips = {
        {"太阳", "月亮"}, {"月亮", "太阳"}, {"夏天", "冬天"},
        {"冬天", "夏天"}, {"东", "西"}, {"南", "北"},
        {"早上", "深夜"}, {"一", "九"}, {"两", "七"}, {"三", "八"},
    };
    lex.off_topic = {
        "本季度的销售报表已按时提交给区域办公室。",
        "书架的安装说明印在包装箱的侧面。",
        "光合作用在植物细胞内把阳光转化为化学能。",
        "委员会将规划听证会推迟到了下个季度。",
    };
    return lex;
}

}  // namespace

const Lexicons& Lexicons::builtin(std::string_view language) {
    static const Lexicons english = make_english();
    static const Lexicons chinese = make_chinese();
    return language == "zh" ? chinese : english;
}

Lexicons Lexicons::load(const std::filesystem::path& path,
                        std::string_view language) {
    std::ifstream in(path);
    if (!in) throw InvalidState("cannot open lexicon file " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw InvalidState("lexicon file is not valid JSON: " + path.string());
    }
    Lexicons lex = builtin(language);
    auto load_map = [&](const char* key, std::map<std::string, std::string>& m) {
        if (!j.contains(key)) return;
        m.clear();
        for (auto it = j.at(key).begin(); it != j.at(key).end(); ++it) {
            m[it.key()] = it.value().get<std::string>();
        }
    };
    load_map("antonyms", lex.antonyms);
    load_map("negations", lex.negations);
    load_map("pronoun_swaps", lex.pronoun_swaps);
    load_map("fact_flips", lex.fact_flips);
    if (j.contains("off_topic")) {
        lex.off_topic = j.at("off_topic").get<std::vector<std::string>>();
    }
    return lex;
}

}  // namespace mateval::corpus
