#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfill/text.hpp"

// Closed word lists used by the rule-based expert. Spellings are French.
namespace crossfill::closed_lists {

inline std::string to_roman(int n) {
  static constexpr std::array<std::pair<int, std::string_view>, 13> table{{{1000, "M"},
                                                                           {900, "CM"},
                                                                           {500, "D"},
                                                                           {400, "CD"},
                                                                           {100, "C"},
                                                                           {90, "XC"},
                                                                           {50, "L"},
                                                                           {40, "XL"},
                                                                           {10, "X"},
                                                                           {9, "IX"},
                                                                           {5, "V"},
                                                                           {4, "IV"},
                                                                           {1, "I"}}};
  if (n < 1 || n > 3999) return {};
  std::string out;
  for (const auto& [value, glyph] : table) {
    while (n >= value) {
      out += glyph;
      n -= value;
    }
  }
  return out;
}

/// French spelling (hyphenated, 1990 style for compounds) of 0..1000.
inline std::string number_to_words(int n) {
  static constexpr std::array<std::string_view, 17> small{"zero",   "un",     "deux",   "trois",    "quatre", "cinq",
                                                          "six",    "sept",   "huit",   "neuf",     "dix",    "onze",
                                                          "douze",  "treize", "quatorze", "quinze", "seize"};
  static constexpr std::array<std::string_view, 7> tens{"vingt", "trente", "quarante", "cinquante", "soixante", "", ""};
  if (n < 0 || n > 1000) return {};
  if (n <= 16) return std::string(small[n]);
  if (n < 20) return "dix-" + std::string(small[n - 10]);
  if (n < 70) {
    const std::string base(tens[n / 10 - 2]);
    const int unit = n % 10;
    if (unit == 0) return base;
    if (unit == 1) return base + "-et-un";
    return base + "-" + std::string(small[unit]);
  }
  if (n < 80) return n == 71 ? "soixante-et-onze" : "soixante-" + number_to_words(n - 60);
  if (n == 80) return "quatre-vingts";
  if (n < 100) return "quatre-vingt-" + number_to_words(n - 80);
  if (n == 1000) return "mille";
  const int hundreds = n / 100;
  const int rest = n % 100;
  std::string head = hundreds == 1 ? "cent" : number_to_words(hundreds) + "-cent";
  if (rest == 0) return hundreds == 1 ? head : head + "s";
  return head + "-" + number_to_words(rest);
}

inline const std::vector<std::string_view>& greek_letters() {
  static const std::vector<std::string_view> v{"ALPHA", "BETA",  "GAMMA", "DELTA",   "EPSILON", "ZETA", "ETA",
                                               "THETA", "IOTA",  "KAPPA", "LAMBDA",  "MU",      "NU",   "XI",
                                               "KSI",   "OMICRON", "PI",  "RHO",     "SIGMA",   "TAU",  "UPSILON",
                                               "PHI",   "KHI",   "CHI",   "PSI",     "OMEGA"};
  return v;
}

struct Element {
  std::string_view symbol;
  std::string_view name;  // French, accents included
};

inline const std::vector<Element>& elements() {
  static const std::vector<Element> v{
      {"H", "hydrogène"},   {"He", "hélium"},      {"Li", "lithium"},      {"Be", "béryllium"},  {"B", "bore"},
      {"C", "carbone"},     {"N", "azote"},        {"O", "oxygène"},       {"F", "fluor"},       {"Ne", "néon"},
      {"Na", "sodium"},     {"Mg", "magnésium"},   {"Al", "aluminium"},    {"Si", "silicium"},   {"P", "phosphore"},
      {"S", "soufre"},      {"Cl", "chlore"},      {"Ar", "argon"},        {"K", "potassium"},   {"Ca", "calcium"},
      {"Sc", "scandium"},   {"Ti", "titane"},      {"V", "vanadium"},      {"Cr", "chrome"},     {"Mn", "manganèse"},
      {"Fe", "fer"},        {"Co", "cobalt"},      {"Ni", "nickel"},       {"Cu", "cuivre"},     {"Zn", "zinc"},
      {"Ga", "gallium"},    {"Ge", "germanium"},   {"As", "arsenic"},      {"Se", "sélénium"},   {"Br", "brome"},
      {"Kr", "krypton"},    {"Rb", "rubidium"},    {"Sr", "strontium"},    {"Y", "yttrium"},     {"Zr", "zirconium"},
      {"Nb", "niobium"},    {"Mo", "molybdène"},   {"Tc", "technétium"},   {"Ru", "ruthénium"},  {"Rh", "rhodium"},
      {"Pd", "palladium"},  {"Ag", "argent"},      {"Cd", "cadmium"},      {"In", "indium"},     {"Sn", "étain"},
      {"Sb", "antimoine"},  {"Te", "tellure"},     {"I", "iode"},          {"Xe", "xénon"},      {"Cs", "césium"},
      {"Ba", "baryum"},     {"La", "lanthane"},    {"Ce", "cérium"},       {"Pr", "praséodyme"}, {"Nd", "néodyme"},
      {"Pm", "prométhium"}, {"Sm", "samarium"},    {"Eu", "europium"},     {"Gd", "gadolinium"}, {"Tb", "terbium"},
      {"Dy", "dysprosium"}, {"Ho", "holmium"},     {"Er", "erbium"},       {"Tm", "thulium"},    {"Yb", "ytterbium"},
      {"Lu", "lutécium"},   {"Hf", "hafnium"},     {"Ta", "tantale"},      {"W", "tungstène"},   {"Re", "rhénium"},
      {"Os", "osmium"},     {"Ir", "iridium"},     {"Pt", "platine"},      {"Au", "or"},         {"Hg", "mercure"},
      {"Tl", "thallium"},   {"Pb", "plomb"},       {"Bi", "bismuth"},      {"Po", "polonium"},   {"At", "astate"},
      {"Rn", "radon"},      {"Fr", "francium"},    {"Ra", "radium"},       {"Ac", "actinium"},   {"Th", "thorium"},
      {"Pa", "protactinium"}, {"U", "uranium"},    {"Np", "neptunium"},    {"Pu", "plutonium"},  {"Am", "américium"},
      {"Cm", "curium"},     {"Bk", "berkélium"},   {"Cf", "californium"},  {"Es", "einsteinium"}, {"Fm", "fermium"},
      {"Md", "mendélévium"}, {"No", "nobélium"},   {"Lr", "lawrencium"},   {"Rf", "rutherfordium"}, {"Db", "dubnium"},
      {"Sg", "seaborgium"}, {"Bh", "bohrium"},     {"Hs", "hassium"},      {"Mt", "meitnérium"}, {"Ds", "darmstadtium"},
      {"Rg", "roentgenium"}, {"Cn", "copernicium"}, {"Nh", "nihonium"},    {"Fl", "flérovium"},  {"Mc", "moscovium"},
      {"Lv", "livermorium"}, {"Ts", "tennesse"},   {"Og", "oganesson"}};
  return v;
}

/// The sixteen named points of the compass rose (O = ouest).
inline const std::vector<std::string_view>& compass_points() {
  static const std::vector<std::string_view> v{"N",   "S",   "E",   "O",   "NE",  "NO",  "SE",  "SO",
                                               "NNE", "ENE", "ESE", "SSE", "SSO", "OSO", "ONO", "NNO"};
  return v;
}

inline const std::vector<std::string_view>& pronouns() {
  static const std::vector<std::string_view> v{"JE",  "TU",  "IL",  "ELLE", "ON",   "NOUS", "VOUS", "ILS",  "ELLES",
                                               "ME",  "TE",  "SE",  "LUI",  "LEUR", "EUX",  "MOI",  "TOI",  "SOI",
                                               "EN",  "Y",   "CE",  "CELA", "CECI", "CA",   "QUI",  "QUE",  "QUOI",
                                               "DONT", "LEQUEL", "LAQUELLE"};
  return v;
}

inline const std::vector<std::string_view>& conjunctions() {
  static const std::vector<std::string_view> v{"MAIS", "OU",    "ET",      "DONC",    "OR",     "NI",
                                               "CAR",  "QUE",   "QUAND",   "COMME",   "SI",     "LORSQUE",
                                               "PUISQUE", "QUOIQUE", "SOIT"};
  return v;
}

inline const std::vector<std::string_view>& prepositions() {
  static const std::vector<std::string_view> v{"A",     "DE",    "EN",     "PAR",   "POUR",   "SUR",    "SOUS",
                                               "DANS",  "AVEC",  "SANS",   "CHEZ",  "VERS",   "ENTRE",  "CONTRE",
                                               "APRES", "AVANT", "PENDANT", "SELON", "MALGRE", "PARMI", "OUTRE",
                                               "VIA",   "DES",   "HORS",   "DEVANT", "DERRIERE"};
  return v;
}

inline const std::vector<std::string_view>& articles() {
  static const std::vector<std::string_view> v{"LE", "LA", "LES", "UN", "UNE", "DES", "DU", "AU", "AUX"};
  return v;
}

struct Department {
  std::string_view code;
  std::string_view name;
};

inline const std::vector<Department>& departments() {
  static const std::vector<Department> v{
      {"01", "Ain"},
      {"02", "Aisne"},
      {"03", "Allier"},
      {"04", "Alpes-de-Haute-Provence"},
      {"05", "Hautes-Alpes"},
      {"06", "Alpes-Maritimes"},
      {"07", "Ardèche"},
      {"08", "Ardennes"},
      {"09", "Ariège"},
      {"10", "Aube"},
      {"11", "Aude"},
      {"12", "Aveyron"},
      {"13", "Bouches-du-Rhône"},
      {"14", "Calvados"},
      {"15", "Cantal"},
      {"16", "Charente"},
      {"17", "Charente-Maritime"},
      {"18", "Cher"},
      {"19", "Corrèze"},
      {"2A", "Corse-du-Sud"},
      {"2B", "Haute-Corse"},
      {"21", "Côte-d'Or"},
      {"22", "Côtes-d'Armor"},
      {"23", "Creuse"},
      {"24", "Dordogne"},
      {"25", "Doubs"},
      {"26", "Drôme"},
      {"27", "Eure"},
      {"28", "Eure-et-Loir"},
      {"29", "Finistère"},
      {"30", "Gard"},
      {"31", "Haute-Garonne"},
      {"32", "Gers"},
      {"33", "Gironde"},
      {"34", "Hérault"},
      {"35", "Ille-et-Vilaine"},
      {"36", "Indre"},
      {"37", "Indre-et-Loire"},
      {"38", "Isère"},
      {"39", "Jura"},
      {"40", "Landes"},
      {"41", "Loir-et-Cher"},
      {"42", "Loire"},
      {"43", "Haute-Loire"},
      {"44", "Loire-Atlantique"},
      {"45", "Loiret"},
      {"46", "Lot"},
      {"47", "Lot-et-Garonne"},
      {"48", "Lozère"},
      {"49", "Maine-et-Loire"},
      {"50", "Manche"},
      {"51", "Marne"},
      {"52", "Haute-Marne"},
      {"53", "Mayenne"},
      {"54", "Meurthe-et-Moselle"},
      {"55", "Meuse"},
      {"56", "Morbihan"},
      {"57", "Moselle"},
      {"58", "Nièvre"},
      {"59", "Nord"},
      {"60", "Oise"},
      {"61", "Orne"},
      {"62", "Pas-de-Calais"},
      {"63", "Puy-de-Dôme"},
      {"64", "Pyrénées-Atlantiques"},
      {"65", "Hautes-Pyrénées"},
      {"66", "Pyrénées-Orientales"},
      {"67", "Bas-Rhin"},
      {"68", "Haut-Rhin"},
      {"69", "Rhône"},
      {"70", "Haute-Saône"},
      {"71", "Saône-et-Loire"},
      {"72", "Sarthe"},
      {"73", "Savoie"},
      {"74", "Haute-Savoie"},
      {"75", "Paris"},
      {"76", "Seine-Maritime"},
      {"77", "Seine-et-Marne"},
      {"78", "Yvelines"},
      {"79", "Deux-Sèvres"},
      {"80", "Somme"},
      {"81", "Tarn"},
      {"82", "Tarn-et-Garonne"},
      {"83", "Var"},
      {"84", "Vaucluse"},
      {"85", "Vendée"},
      {"86", "Vienne"},
      {"87", "Haute-Vienne"},
      {"88", "Vosges"},
      {"89", "Yonne"},
      {"90", "Territoire de Belfort"},
      {"91", "Essonne"},
      {"92", "Hauts-de-Seine"},
      {"93", "Seine-Saint-Denis"},
      {"94", "Val-de-Marne"},
      {"95", "Val-d'Oise"},
      {"971", "Guadeloupe"},
      {"972", "Martinique"},
      {"973", "Guyane"},
      {"974", "La Réunion"},
      {"976", "Mayotte"}};
  return v;
}

}  // namespace crossfill::closed_lists
