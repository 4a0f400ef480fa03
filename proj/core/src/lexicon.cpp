#include <cctype>
#include <fstream>
#include <sstream>

#include "haystacks/grammar.hpp"

namespace haystacks {

namespace {

Lexicon build_builtin() {
    Lexicon lx;
    lx.names = {
        "Mary",      "Nina",      "Paul",        "Walter",    "Gary",      "Dorothy",
        "Susan",     "Delbert",   "Leonard",     "Justin",    "Jennifer",  "Benjamin",
        "Jason",     "John",      "Stephen",     "Elsie",     "Janna",     "Ramon",
        "Ossie",     "Brian",     "Natividad",   "Natasha",   "Michael",   "Napoleon",
        "Melissa",   "Chae",      "Charlette",   "Rex",       "Pamela",    "Calvin",
        "Elizabeth", "Bernard",   "Michelle",    "Dana",      "Caitlin",   "Alice",
        "Beatrice",  "Brandon",   "James",       "Joseph",    "Francis",   "Brenda",
        "Virginia",  "Dionne",    "Louise",      "Christopher", "Nelson",  "Carol",
        "Philomena", "Raymonde",  "Carla",       "Shirley",   "Steven",    "Genevieve",
        "Jeannine",  "Lisa",      "David",       "Kathleen",  "Tamara",    "Marvin",
        "Jewell",    "Donald",    "Daniel",      "Margaret",  "Patricia",  "Robert",
        "Linda",     "William",   "Barbara",     "Richard",   "Joan",      "Thomas",
        "Sandra",    "Charles",   "Nancy",       "Matthew",   "Karen",     "Edward",
    };
    lx.unary = {
        {"happy", "is happy", "is not happy"},
        {"rich", "is rich", "is not rich"},
        {"brave_person", "is a brave person", "is not a brave person"},
        {"night_owl", "is a night owl", "is not a night owl"},
        {"avid_collector",
         "is an avid collector of autographed memorabilia from famous musicians",
         "is not an avid collector of autographed memorabilia from famous musicians"},
        {"enjoys_mountain_biking", "enjoys mountain biking", "does not enjoy mountain biking"},
        {"hosts_tech_podcast", "hosts a popular podcast about emerging technologies",
         "does not host a popular podcast about emerging technologies"},
        {"owns_smart_tv", "owns a smart tv", "does not own a smart tv"},
        {"collects_vinyl", "collects vintage vinyl records",
         "does not collect vintage vinyl records"},
        {"curious_person", "is a curious person", "is not a curious person"},
        {"tall_person", "is a tall person", "is not a tall person"},
        {"strong_person", "is a strong person", "is not a strong person"},
        {"formal_person", "is a formal person", "is not a formal person"},
        {"colorblind", "is colorblind", "is not colorblind"},
        {"european", "is a european", "is not a european"},
        {"romantic_person", "is a romantic person", "is not a romantic person"},
        {"tourist", "is a tourist", "is not a tourist"},
        {"cybersecurity_expert", "is a cybersecurity expert", "is not a cybersecurity expert"},
        {"enjoys_rooftop_gardening", "enjoys rooftop gardening",
         "does not enjoy rooftop gardening"},
        {"owns_gaming_pc", "owns a high-end gaming PC with custom-built components",
         "does not own a high-end gaming PC with custom-built components"},
        {"owns_3d_printer", "owns a 3D printer", "does not own a 3D printer"},
        {"attends_hackathons", "frequently participates in hackathons and coding competitions",
         "does not frequently participate in hackathons and coding competitions"},
        {"travels_domestically", "travels domestically frequently",
         "does not travel domestically frequently"},
        {"enjoys_trail_running", "does enjoy trail running", "does not enjoy trail running"},
        {"allergic_to_anything", "is allergic to anything", "is not allergic to anything"},
        {"kind_person", "is a kind person", "is not a kind person"},
        {"generous_person", "is a generous person", "is not a generous person"},
        {"patient_person", "is a patient person", "is not a patient person"},
        {"creative_person", "is a creative person", "is not a creative person"},
        {"funny_person", "is a funny person", "is not a funny person"},
        {"wise_person", "is a wise person", "is not a wise person"},
        {"organized_person", "is an organized person", "is not an organized person"},
        {"popular_person", "is a popular person", "is not a popular person"},
        {"humble_person", "is a humble person", "is not a humble person"},
        {"calm_person", "is a calm person", "is not a calm person"},
        {"left_handed", "is left handed", "is not left handed"},
        {"vegetarian", "is a vegetarian", "is not a vegetarian"},
        {"chess_player", "is a chess player", "is not a chess player"},
        {"coffee_drinker", "is a coffee drinker", "is not a coffee drinker"},
        {"tea_enthusiast", "is a tea enthusiast", "is not a tea enthusiast"},
        {"dog_owner", "owns a dog", "does not own a dog"},
        {"cat_lover", "is a cat lover", "is not a cat lover"},
        {"marathon_runner", "is a marathon runner", "is not a marathon runner"},
        {"amateur_astronomer", "is an amateur astronomer", "is not an amateur astronomer"},
        {"plays_the_violin", "plays the violin", "does not play the violin"},
        {"speaks_three_languages", "speaks three languages fluently",
         "does not speak three languages fluently"},
        {"keeps_a_journal", "keeps a handwritten journal",
         "does not keep a handwritten journal"},
        {"bakes_sourdough", "bakes sourdough bread on weekends",
         "does not bake sourdough bread on weekends"},
        {"restores_furniture", "restores antique furniture as a hobby",
         "does not restore antique furniture as a hobby"},
        {"collects_stamps", "collects rare postage stamps",
         "does not collect rare postage stamps"},
        {"practices_origami", "practices origami daily", "does not practice origami daily"},
        {"blue_eyed", "is blue eyed", "is not blue eyed"},
    };
    lx.binary = {
        {"likes", "likes", "does not like"},
        {"hates", "hates", "does not hate"},
        {"richer", "is richer than", "is not richer than"},
        {"quieter", "is quieter than", "is not quieter than"},
        {"older", "is older than", "is not older than"},
        {"younger", "is younger than", "is not younger than"},
        {"taller", "is taller than", "is not taller than"},
        {"sibling_of", "is a sibling of", "is not a sibling of"},
        {"client_of", "is a client of", "is not a client of"},
        {"liked_by", "is liked by", "is not liked by"},
        {"hated_by", "is hated by", "is not hated by"},
        {"knows", "knows", "does not know"},
        {"mentor_of", "is a mentor of", "is not a mentor of"},
    };
    lx.propositional = {
        {"tower_leans", "A tower leans significantly", "A tower does not lean significantly"},
        {"mirrors_fog", "Mirrors fog permanently in one particular house",
         "Mirrors do not fog permanently in one particular house"},
        {"glass_rain", "Glass rain falls on a distant planet",
         "Glass rain does not fall on a distant planet"},
        {"round_tables", "A city has outlawed the use of round tables",
         "A city has not outlawed the use of round tables"},
        {"river_backwards", "A river flows backwards during the eclipse",
         "A river does not flow backwards during the eclipse"},
        {"clocks_chime", "The clocks in the tower chime at midnight",
         "The clocks in the tower do not chime at midnight"},
        {"library_open", "The old library stays open through the night",
         "The old library does not stay open through the night"},
        {"lighthouse_on", "The lighthouse keeps its light on during storms",
         "The lighthouse does not keep its light on during storms"},
        {"train_on_time", "The night train arrives exactly on time",
         "The night train does not arrive exactly on time"},
        {"garden_blooms", "The hidden garden blooms in winter",
         "The hidden garden does not bloom in winter"},
        {"bell_rings", "The harbor bell rings twice at dawn",
         "The harbor bell does not ring twice at dawn"},
        {"snow_south", "Snow falls on the southern coast",
         "Snow does not fall on the southern coast"},
        {"bridge_closes", "The old bridge closes before sunset",
         "The old bridge does not close before sunset"},
    };
    return lx;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

const Lexicon& Lexicon::builtin() {
    static const Lexicon lx = build_builtin();
    return lx;
}

std::vector<std::string> Lexicon::load_names(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw GenerationError("cannot open lexicon file: " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#')
            names.push_back(line);
    }
    return names;
}

std::vector<PredEntry> Lexicon::load_predicates(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw GenerationError("cannot open lexicon file: " + path);
    std::vector<PredEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ss(line);
        PredEntry e;
        if (!std::getline(ss, e.symbol, '|') || !std::getline(ss, e.positive, '|') ||
            !std::getline(ss, e.negative))
            throw GenerationError(path + ":" + std::to_string(lineno) +
                                  ": expected symbol|positive|negative");
        out.push_back(std::move(e));
    }
    return out;
}

std::string constant_of_name(const std::string& english_name) {
    std::string c;
    c.reserve(english_name.size());
    for (char ch : english_name)
        c.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return c;
}

}  // namespace haystacks
