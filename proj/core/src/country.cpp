#include "popstat/country.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <ostream>

#include "popstat/error.hpp"

namespace popstat {
namespace {

struct CountryEntry {
  std::string_view code;
  std::string_view name;
  // '|'-separated alternative spellings seen in WPP, OWID and World Bank files.
  std::string_view aliases;
};

// clang-format off
constexpr std::array kCountries = std::to_array<CountryEntry>({
  {"AFG", "Afghanistan", ""},
  {"ALB", "Albania", ""},
  {"DZA", "Algeria", ""},
  {"ASM", "American Samoa", ""},
  {"AND", "Andorra", ""},
  {"AGO", "Angola", ""},
  {"AIA", "Anguilla", ""},
  {"ATG", "Antigua and Barbuda", ""},
  {"ARG", "Argentina", ""},
  {"ARM", "Armenia", ""},
  {"ABW", "Aruba", ""},
  {"AUS", "Australia", ""},
  {"AUT", "Austria", ""},
  {"AZE", "Azerbaijan", ""},
  {"BHS", "Bahamas", "Bahamas, The|The Bahamas"},
  {"BHR", "Bahrain", ""},
  {"BGD", "Bangladesh", ""},
  {"BRB", "Barbados", ""},
  {"BLR", "Belarus", ""},
  {"BEL", "Belgium", ""},
  {"BLZ", "Belize", ""},
  {"BEN", "Benin", ""},
  {"BMU", "Bermuda", ""},
  {"BTN", "Bhutan", ""},
  {"BOL", "Bolivia", "Bolivia (Plurinational State of)|Plurinational State of Bolivia"},
  {"BES", "Bonaire Sint Eustatius and Saba", "Bonaire, Sint Eustatius and Saba|Caribbean Netherlands"},
  {"BIH", "Bosnia and Herzegovina", ""},
  {"BWA", "Botswana", ""},
  {"BRA", "Brazil", ""},
  {"VGB", "British Virgin Islands", "Virgin Islands, British"},
  {"BRN", "Brunei", "Brunei Darussalam"},
  {"BGR", "Bulgaria", ""},
  {"BFA", "Burkina Faso", ""},
  {"BDI", "Burundi", ""},
  {"CPV", "Cape Verde", "Cabo Verde"},
  {"KHM", "Cambodia", ""},
  {"CMR", "Cameroon", ""},
  {"CAN", "Canada", ""},
  {"CYM", "Cayman Islands", ""},
  {"CAF", "Central African Republic", "Central African Rep."},
  {"TCD", "Chad", ""},
  {"CHL", "Chile", ""},
  {"CHN", "China", ""},
  {"HKG", "Hong Kong", "China, Hong Kong SAR|Hong Kong SAR, China"},
  {"MAC", "Macao", "China, Macao SAR|Macao SAR, China|Macau"},
  {"TWN", "Taiwan", "China, Taiwan Province of China|Taiwan, China"},
  {"COL", "Colombia", ""},
  {"COM", "Comoros", ""},
  {"COG", "Congo", "Republic of the Congo|Congo, Rep.|Congo-Brazzaville"},
  {"COK", "Cook Islands", ""},
  {"CRI", "Costa Rica", ""},
  {"CIV", "Cote d'Ivoire", "C\xc3\xb4te d'Ivoire|Ivory Coast"},
  {"HRV", "Croatia", ""},
  {"CUB", "Cuba", ""},
  {"CUW", "Curacao", "Cura\xc3\xa7" "ao"},
  {"CYP", "Cyprus", ""},
  {"CZE", "Czechia", "Czech Republic"},
  {"COD", "Democratic Republic of Congo", "Democratic Republic of the Congo|Congo, Dem. Rep.|DR Congo"},
  {"DNK", "Denmark", ""},
  {"DJI", "Djibouti", ""},
  {"DMA", "Dominica", ""},
  {"DOM", "Dominican Republic", ""},
  {"ECU", "Ecuador", ""},
  {"EGY", "Egypt", "Egypt, Arab Rep."},
  {"SLV", "El Salvador", ""},
  {"GNQ", "Equatorial Guinea", ""},
  {"ERI", "Eritrea", ""},
  {"EST", "Estonia", ""},
  {"SWZ", "Eswatini", "Swaziland"},
  {"ETH", "Ethiopia", ""},
  {"FLK", "Falkland Islands", "Falkland Islands (Malvinas)"},
  {"FRO", "Faroe Islands", "Faeroe Islands"},
  {"FJI", "Fiji", ""},
  {"FIN", "Finland", ""},
  {"FRA", "France", ""},
  {"GUF", "French Guiana", ""},
  {"PYF", "French Polynesia", ""},
  {"GAB", "Gabon", ""},
  {"GMB", "Gambia", "Gambia, The|The Gambia"},
  {"GEO", "Georgia", ""},
  {"DEU", "Germany", ""},
  {"GHA", "Ghana", ""},
  {"GIB", "Gibraltar", ""},
  {"GRC", "Greece", ""},
  {"GRL", "Greenland", ""},
  {"GRD", "Grenada", ""},
  {"GLP", "Guadeloupe", ""},
  {"GUM", "Guam", ""},
  {"GTM", "Guatemala", ""},
  {"GGY", "Guernsey", ""},
  {"GIN", "Guinea", ""},
  {"GNB", "Guinea-Bissau", "Guinea Bissau"},
  {"GUY", "Guyana", ""},
  {"HTI", "Haiti", ""},
  {"VAT", "Vatican", "Holy See"},
  {"HND", "Honduras", ""},
  {"HUN", "Hungary", ""},
  {"ISL", "Iceland", ""},
  {"IND", "India", ""},
  {"IDN", "Indonesia", ""},
  {"IRN", "Iran", "Iran (Islamic Republic of)|Iran, Islamic Rep."},
  {"IRQ", "Iraq", ""},
  {"IRL", "Ireland", ""},
  {"IMN", "Isle of Man", ""},
  {"ISR", "Israel", ""},
  {"ITA", "Italy", ""},
  {"JAM", "Jamaica", ""},
  {"JPN", "Japan", ""},
  {"JEY", "Jersey", ""},
  {"JOR", "Jordan", ""},
  {"KAZ", "Kazakhstan", ""},
  {"KEN", "Kenya", ""},
  {"KIR", "Kiribati", ""},
  {"XKX", "Kosovo", "Kosovo (under UNSC res. 1244)"},
  {"KWT", "Kuwait", ""},
  {"KGZ", "Kyrgyzstan", "Kyrgyz Republic"},
  {"LAO", "Laos", "Lao People's Democratic Republic|Lao PDR"},
  {"LVA", "Latvia", ""},
  {"LBN", "Lebanon", ""},
  {"LSO", "Lesotho", ""},
  {"LBR", "Liberia", ""},
  {"LBY", "Libya", ""},
  {"LIE", "Liechtenstein", ""},
  {"LTU", "Lithuania", ""},
  {"LUX", "Luxembourg", ""},
  {"MDG", "Madagascar", ""},
  {"MWI", "Malawi", ""},
  {"MYS", "Malaysia", ""},
  {"MDV", "Maldives", ""},
  {"MLI", "Mali", ""},
  {"MLT", "Malta", ""},
  {"MHL", "Marshall Islands", ""},
  {"MTQ", "Martinique", ""},
  {"MRT", "Mauritania", ""},
  {"MUS", "Mauritius", ""},
  {"MYT", "Mayotte", ""},
  {"MEX", "Mexico", ""},
  {"FSM", "Micronesia (country)", "Micronesia (Fed. States of)|Micronesia, Fed. Sts.|Micronesia"},
  {"MDA", "Moldova", "Republic of Moldova"},
  {"MCO", "Monaco", ""},
  {"MNG", "Mongolia", ""},
  {"MNE", "Montenegro", ""},
  {"MSR", "Montserrat", ""},
  {"MAR", "Morocco", ""},
  {"MOZ", "Mozambique", ""},
  {"MMR", "Myanmar", "Burma"},
  {"NAM", "Namibia", ""},
  {"NRU", "Nauru", ""},
  {"NPL", "Nepal", ""},
  {"NLD", "Netherlands", "Netherlands (Kingdom of the)"},
  {"NCL", "New Caledonia", ""},
  {"NZL", "New Zealand", ""},
  {"NIC", "Nicaragua", ""},
  {"NER", "Niger", ""},
  {"NGA", "Nigeria", ""},
  {"NIU", "Niue", ""},
  {"PRK", "North Korea", "Dem. People's Republic of Korea|Democratic People's Republic of Korea|Korea, Dem. People's Rep."},
  {"MKD", "North Macedonia", "Macedonia|The former Yugoslav Republic of Macedonia"},
  {"MNP", "Northern Mariana Islands", ""},
  {"NOR", "Norway", ""},
  {"OMN", "Oman", ""},
  {"PAK", "Pakistan", ""},
  {"PLW", "Palau", ""},
  {"PSE", "Palestine", "State of Palestine|West Bank and Gaza"},
  {"PAN", "Panama", ""},
  {"PNG", "Papua New Guinea", ""},
  {"PRY", "Paraguay", ""},
  {"PER", "Peru", ""},
  {"PHL", "Philippines", ""},
  {"POL", "Poland", ""},
  {"PRT", "Portugal", ""},
  {"PRI", "Puerto Rico", ""},
  {"QAT", "Qatar", ""},
  {"REU", "Reunion", "R\xc3\xa9union"},
  {"ROU", "Romania", ""},
  {"RUS", "Russia", "Russian Federation"},
  {"RWA", "Rwanda", ""},
  {"BLM", "Saint Barthelemy", "Saint Barth\xc3\xa9lemy"},
  {"SHN", "Saint Helena", "Saint Helena, Ascension and Tristan da Cunha"},
  {"KNA", "Saint Kitts and Nevis", "St. Kitts and Nevis"},
  {"LCA", "Saint Lucia", "St. Lucia"},
  {"MAF", "Saint Martin (French part)", "St. Martin (French part)"},
  {"SPM", "Saint Pierre and Miquelon", ""},
  {"VCT", "Saint Vincent and the Grenadines", "St. Vincent and the Grenadines"},
  {"WSM", "Samoa", ""},
  {"SMR", "San Marino", ""},
  {"STP", "Sao Tome and Principe", "S\xc3\xa3o Tom\xc3\xa9 and Pr\xc3\xadncipe"},
  {"SAU", "Saudi Arabia", ""},
  {"SEN", "Senegal", ""},
  {"SRB", "Serbia", ""},
  {"SYC", "Seychelles", ""},
  {"SLE", "Sierra Leone", ""},
  {"SGP", "Singapore", ""},
  {"SXM", "Sint Maarten (Dutch part)", "Sint Maarten"},
  {"SVK", "Slovakia", "Slovak Republic"},
  {"SVN", "Slovenia", ""},
  {"SLB", "Solomon Islands", ""},
  {"SOM", "Somalia", ""},
  {"ZAF", "South Africa", ""},
  {"KOR", "South Korea", "Republic of Korea|Korea, Rep.|Korea"},
  {"SSD", "South Sudan", ""},
  {"ESP", "Spain", ""},
  {"LKA", "Sri Lanka", ""},
  {"SDN", "Sudan", ""},
  {"SUR", "Suriname", ""},
  {"SWE", "Sweden", ""},
  {"CHE", "Switzerland", ""},
  {"SYR", "Syria", "Syrian Arab Republic"},
  {"TJK", "Tajikistan", ""},
  {"TZA", "Tanzania", "United Republic of Tanzania"},
  {"THA", "Thailand", ""},
  {"TLS", "East Timor", "Timor-Leste|Timor"},
  {"TGO", "Togo", ""},
  {"TKL", "Tokelau", ""},
  {"TON", "Tonga", ""},
  {"TTO", "Trinidad and Tobago", ""},
  {"TUN", "Tunisia", ""},
  {"TUR", "Turkey", "T\xc3\xbcrkiye|Turkiye"},
  {"TKM", "Turkmenistan", ""},
  {"TCA", "Turks and Caicos Islands", ""},
  {"TUV", "Tuvalu", ""},
  {"UGA", "Uganda", ""},
  {"UKR", "Ukraine", ""},
  {"ARE", "United Arab Emirates", ""},
  {"GBR", "United Kingdom", "United Kingdom of Great Britain and Northern Ireland"},
  {"USA", "United States", "United States of America"},
  {"VIR", "United States Virgin Islands", "Virgin Islands (U.S.)"},
  {"URY", "Uruguay", ""},
  {"UZB", "Uzbekistan", ""},
  {"VUT", "Vanuatu", ""},
  {"VEN", "Venezuela", "Venezuela (Bolivarian Republic of)|Venezuela, RB"},
  {"VNM", "Vietnam", "Viet Nam"},
  {"WLF", "Wallis and Futuna", "Wallis and Futuna Islands"},
  {"ESH", "Western Sahara", ""},
  {"YEM", "Yemen", "Yemen, Rep."},
  {"ZMB", "Zambia", ""},
  {"ZWE", "Zimbabwe", ""},
});
// clang-format on

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char c : name) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

const std::map<std::string, std::string_view>& name_index() {
  static const auto index = [] {
    std::map<std::string, std::string_view> m;
    for (const auto& entry : kCountries) {
      m.emplace(normalize_name(entry.name), entry.code);
      std::string_view rest = entry.aliases;
      while (!rest.empty()) {
        auto bar = rest.find('|');
        m.emplace(normalize_name(rest.substr(0, bar)), entry.code);
        rest = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
      }
    }
    return m;
  }();
  return index;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool is_alpha3(std::string_view s) {
  return s.size() == 3 &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

CountryCode::CountryCode(std::string_view code) : code_(code) {
  if (!is_alpha3(code)) {
    throw Error("invalid ISO-3166 alpha-3 code '" + std::string(code) + "'");
  }
}

std::optional<CountryCode> CountryCode::parse(std::string_view code) {
  if (!is_alpha3(code)) return std::nullopt;
  return CountryCode(Unchecked{}, std::string(code));
}

std::ostream& operator<<(std::ostream& os, const CountryCode& code) { return os << code.str(); }

std::optional<CountryCode> code_for_name(std::string_view name) {
  const auto& index = name_index();
  auto it = index.find(normalize_name(name));
  if (it == index.end()) return std::nullopt;
  return CountryCode(it->second);
}

std::optional<std::string_view> name_for_code(const CountryCode& code) {
  for (const auto& entry : kCountries) {
    if (entry.code == code.str()) return entry.name;
  }
  return std::nullopt;
}

std::string display_name(const CountryCode& code) {
  auto name = name_for_code(code);
  return name ? std::string(*name) : code.str();
}

std::vector<CountryCode> near_matches(std::string_view query,
                                      const std::vector<CountryCode>& known,
                                      std::size_t limit) {
  const std::string q = normalize_name(query);
  std::vector<std::pair<std::size_t, CountryCode>> scored;
  scored.reserve(known.size());
  for (const auto& code : known) {
    std::size_t d = edit_distance(q, normalize_name(code.str()));
    if (auto name = name_for_code(code)) {
      d = std::min(d, edit_distance(q, normalize_name(*name)));
    }
    scored.emplace_back(d, code);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CountryCode> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace popstat
