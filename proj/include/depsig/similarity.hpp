#pragma once

// Topic similarity across weekly windows (KL, Jensen-Shannon, Jaccard over
// harmonized depression-related top words) and the participation trend of
// users posting into flagged topics.

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/corpus.hpp"
#include "depsig/evaluation.hpp"
#include "depsig/lexicon.hpp"
#include "depsig/topics.hpp"

namespace depsig {

inline constexpr double kDefaultSmoothing = 1e-10;

namespace detail {

inline std::vector<double> smooth(std::span<const double> p, double eps) {
    std::vector<double> out(p.begin(), p.end());
    double total = 0.0;
    for (auto& v : out) {
        if (v < 0.0 || !std::isfinite(v)) throw ValidationError("distribution has a negative or non-finite entry");
        v += eps;
        total += v;
    }
    for (auto& v : out) v /= total;
    return out;
}

inline double kl_raw(std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
    return std::max(0.0, s);
}

inline void check_pair(std::span<const double> p, std::span<const double> q, double eps) {
    if (p.size() != q.size())
        throw ValidationError("distributions have different supports (" + std::to_string(p.size()) + " vs " +
                              std::to_string(q.size()) + ")");
    if (p.empty()) throw ValidationError("empty distribution");
    if (!(eps > 0.0)) throw ValidationError("smoothing epsilon must be positive");
}

}  // namespace detail

/// Σ p ln(p/q) after ε-smoothing and renormalizing both distributions.
inline double kl_divergence(std::span<const double> p, std::span<const double> q, double eps = kDefaultSmoothing) {
    detail::check_pair(p, q, eps);
    const auto ps = detail::smooth(p, eps);
    const auto qs = detail::smooth(q, eps);
    return detail::kl_raw(ps, qs);
}

/// ½KL(P‖M) + ½KL(Q‖M) with M = (P+Q)/2, on the smoothed distributions.
inline double js_divergence(std::span<const double> p, std::span<const double> q, double eps = kDefaultSmoothing) {
    detail::check_pair(p, q, eps);
    const auto ps = detail::smooth(p, eps);
    const auto qs = detail::smooth(q, eps);
    std::vector<double> m(ps.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (ps[i] + qs[i]) / 2.0;
    return 0.5 * detail::kl_raw(ps, m) + 0.5 * detail::kl_raw(qs, m);
}

inline double jaccard_topk(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() || b.empty()) throw ValidationError("jaccard_topk: word sets must be non-empty");
    std::size_t inter = 0;
    for (const auto& w : a) inter += b.count(w);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// ---------------------------------------------------------------------------
// Synonyms
// ---------------------------------------------------------------------------

class SynonymMap {
public:
    /// Adds word -> canonical. Canonical words must not themselves be
    /// rewritten to something else, which keeps the map acyclic and one step.
    void add(std::string word, std::string canonical) {
        if (word == canonical) return;
        if (const auto it = map_.find(canonical); it != map_.end())
            throw ValidationError("synonym target '" + canonical + "' is itself mapped to '" + it->second + "'");
        if (targets_.count(word)) throw ValidationError("synonym source '" + word + "' is used as a canonical word");
        if (const auto it = map_.find(word); it != map_.end() && it->second != canonical)
            throw ValidationError("synonym '" + word + "' mapped to both '" + it->second + "' and '" + canonical + "'");
        map_[word] = canonical;
        targets_.insert(std::move(canonical));
    }

    const std::string& canonical(const std::string& word) const {
        const auto it = map_.find(word);
        return it == map_.end() ? word : it->second;
    }

    std::size_t size() const { return map_.size(); }
    const std::map<std::string, std::string>& entries() const { return map_; }

private:
    std::map<std::string, std::string> map_;
    std::set<std::string> targets_;
};

/// Two-column TSV: word, canonical word.
inline SynonymMap read_synonym_map(std::istream& in, const std::string& source = "<synonyms>") {
    SynonymMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        if (trim(line).empty()) continue;
        const auto f = split(line, '\t');
        if (f.size() != 2) throw ParseError(source, line_no, "expected 'word<TAB>canonical'");
        const auto w = ascii_lower(trim(f[0]));
        const auto c = ascii_lower(trim(f[1]));
        if (w.empty() || c.empty()) throw ParseError(source, line_no, "empty synonym field");
        try {
            map.add(w, c);
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return map;
}

inline SynonymMap load_synonym_map(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_synonym_map(in, path.string());
}

inline void write_synonym_map(const SynonymMap& map, std::ostream& out) {
    for (const auto& [w, c] : map.entries()) out << w << '\t' << c << '\n';
}

inline bool operator==(const SynonymMap& a, const SynonymMap& b) { return a.entries() == b.entries(); }

inline std::vector<std::string> harmonize_synonyms(const std::vector<std::string>& words, const SynonymMap& map) {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(map.canonical(w));
    return out;
}

inline std::set<std::string> harmonize_synonyms(const std::set<std::string>& words, const SynonymMap& map) {
    std::set<std::string> out;
    for (const auto& w : words) out.insert(map.canonical(w));
    return out;
}

// ---------------------------------------------------------------------------
// Window similarity report
// ---------------------------------------------------------------------------

enum class PairAggregate { all_pairs, best_match };

struct SimilarityOptions {
    std::size_t top_k = 15;
    std::size_t retain_k = 10;
    std::size_t min_hits = 3;
    double epsilon = kDefaultSmoothing;
    PairAggregate aggregate = PairAggregate::all_pairs;
    /// Which set-overlap reading feeds the headline "similarity" aggregate.
    std::string table_metric = "jaccard";  // "jaccard" | "js"
    PValueOptions p_value;
};

/// A fitted window: its model and the period it belongs to.
struct WindowTopics {
    TimeWindow window;
    std::string period;  ///< "before" | "during"
    TopicModel model;
};

struct SimilarityPair {
    std::size_t window_a = 0, window_b = 0;
    std::size_t topic_i = 0, topic_j = 0;
    std::string period;
    std::string month;  ///< YYYY-MM when both windows start in the same month, else empty
    double kl = 0.0, js = 0.0, jaccard = 0.0;
};

struct SimilarityAggregate {
    std::size_t pairs = 0;
    double mean_kl = 0.0, mean_js = 0.0, mean_jaccard = 0.0;
    double similarity = 0.0;  ///< mean of the configured table metric
    std::optional<Correlation> spearman_jaccard_js;
};

struct SimilarityReport {
    std::vector<SimilarityPair> pairs;
    std::map<std::string, SimilarityAggregate> by_period;
    std::map<std::string, SimilarityAggregate> by_month;
    std::size_t skipped_topics = 0;  ///< flagged topics without depression words
    std::vector<std::string> warnings;
    std::string table_metric;
};

namespace detail {

struct RetainedTopic {
    std::size_t topic_id;
    std::set<std::string> words;  ///< harmonized
};

/// Probability mass of each canonical word in `support` under topic `k`,
/// summing vocabulary words that harmonize to the same canonical form.
inline std::vector<double> restricted_distribution(const TopicModel& model, std::size_t k,
                                                   const std::vector<std::string>& support,
                                                   const std::unordered_map<std::string, std::vector<std::size_t>>& vocab_by_canon) {
    std::vector<double> p(support.size(), 0.0);
    for (std::size_t s = 0; s < support.size(); ++s)
        if (const auto it = vocab_by_canon.find(support[s]); it != vocab_by_canon.end())
            for (auto w : it->second) p[s] += model.phi[k][w];
    return p;
}

inline SimilarityAggregate aggregate_pairs(const std::vector<const SimilarityPair*>& pairs, const SimilarityOptions& opts) {
    SimilarityAggregate a;
    a.pairs = pairs.size();
    if (pairs.empty()) return a;
    std::vector<double> jac, js;
    for (const auto* p : pairs) {
        a.mean_kl += p->kl;
        a.mean_js += p->js;
        a.mean_jaccard += p->jaccard;
        jac.push_back(p->jaccard);
        js.push_back(p->js);
    }
    const double n = static_cast<double>(pairs.size());
    a.mean_kl /= n;
    a.mean_js /= n;
    a.mean_jaccard /= n;
    a.similarity = opts.table_metric == "js" ? a.mean_js : a.mean_jaccard;
    try {
        a.spearman_jaccard_js = spearman(jac, js, opts.p_value);
    } catch (const ValidationError&) {
        // fewer than 3 pairs or a constant metric: correlation undefined
    }
    return a;
}

}  // namespace detail

/// Compares flagged topics across every pair of windows in the same period.
/// Each topic keeps the depression-related words among its top_k (at most
/// retain_k, harmonized); divergences use φ restricted to the union of the
/// two retained sets.
inline SimilarityReport window_similarity_report(const std::vector<WindowTopics>& windows, const TermList& who,
                                                 const EmotionLexicon& nrc, const SynonymMap& synonyms,
                                                 const SimilarityOptions& opts) {
    if (opts.top_k < opts.retain_k) throw ValidationError("similarity: top_k must be >= retain_k");
    if (opts.retain_k < 1) throw ValidationError("similarity: retain_k must be >= 1");
    if (opts.table_metric != "jaccard" && opts.table_metric != "js")
        throw ValidationError("similarity: table metric must be 'jaccard' or 'js'");
    if (windows.size() < 2) throw ValidationError("similarity: needs at least two fitted windows");

    SimilarityReport rep;
    rep.table_metric = opts.table_metric;
    std::vector<std::vector<detail::RetainedTopic>> retained(windows.size());
    std::vector<std::unordered_map<std::string, std::vector<std::size_t>>> canon_index(windows.size());
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto& model = windows[w].model;
        for (std::size_t v = 0; v < model.vocab.size(); ++v) canon_index[w][synonyms.canonical(model.vocab[v])].push_back(v);
        const auto k = std::min(opts.top_k, model.vocab.size());
        const auto summaries = flag_depression_topics(top_words(model, k), who, nrc, opts.min_hits);
        for (const auto& s : summaries) {
            if (!s.depression_flag) continue;
            detail::RetainedTopic rt{s.topic_id, {}};
            std::size_t kept = 0;
            for (const auto& [word, p] : s.top_words) {
                if (kept == opts.retain_k) break;
                if (!is_depression_word(word, who, nrc)) continue;
                rt.words.insert(synonyms.canonical(word));
                ++kept;
            }
            if (rt.words.empty()) {
                ++rep.skipped_topics;
                continue;
            }
            retained[w].push_back(std::move(rt));
        }
        if (retained[w].empty())
            rep.warnings.push_back("window " + std::to_string(windows[w].window.index) +
                                   " has no flagged topics; excluded from aggregates");
    }

    for (std::size_t a = 0; a < windows.size(); ++a)
        for (std::size_t b = a + 1; b < windows.size(); ++b) {
            if (windows[a].period != windows[b].period) continue;
            const auto month_a = windows[a].window.start.month_key();
            const auto month = month_a == windows[b].window.start.month_key() ? month_a : std::string();
            std::vector<SimilarityPair> block;
            for (const auto& ti : retained[a])
                for (const auto& tj : retained[b]) {
                    std::set<std::string> uni = ti.words;
                    uni.insert(tj.words.begin(), tj.words.end());
                    const std::vector<std::string> support(uni.begin(), uni.end());
                    const auto p = detail::restricted_distribution(windows[a].model, ti.topic_id, support, canon_index[a]);
                    const auto q = detail::restricted_distribution(windows[b].model, tj.topic_id, support, canon_index[b]);
                    SimilarityPair pr;
                    pr.window_a = windows[a].window.index;
                    pr.window_b = windows[b].window.index;
                    pr.topic_i = ti.topic_id;
                    pr.topic_j = tj.topic_id;
                    pr.period = windows[a].period;
                    pr.month = month;
                    pr.kl = kl_divergence(p, q, opts.epsilon);
                    pr.js = js_divergence(p, q, opts.epsilon);
                    pr.jaccard = jaccard_topk(ti.words, tj.words);
                    block.push_back(pr);
                }
            if (opts.aggregate == PairAggregate::best_match) {
                // Keep, for every topic of window a, its highest-Jaccard partner.
                std::map<std::size_t, SimilarityPair> best;
                for (const auto& pr : block) {
                    auto it = best.find(pr.topic_i);
                    if (it == best.end() || pr.jaccard > it->second.jaccard) best[pr.topic_i] = pr;
                }
                block.clear();
                for (auto& [t, pr] : best) block.push_back(pr);
            }
            rep.pairs.insert(rep.pairs.end(), block.begin(), block.end());
        }

    std::map<std::string, std::vector<const SimilarityPair*>> period_groups, month_groups;
    for (const auto& p : rep.pairs) {
        period_groups[p.period].push_back(&p);
        if (!p.month.empty()) month_groups[p.month].push_back(&p);
    }
    for (const auto& [k, v] : period_groups) rep.by_period[k] = detail::aggregate_pairs(v, opts);
    for (const auto& [k, v] : month_groups) rep.by_month[k] = detail::aggregate_pairs(v, opts);
    return rep;
}

inline void write_similarity_pairs_csv(const SimilarityReport& rep, std::ostream& out) {
    out << "period,month,window_a,window_b,topic_i,topic_j,kl,js,jaccard\n";
    for (const auto& p : rep.pairs)
        out << p.period << ',' << p.month << ',' << p.window_a << ',' << p.window_b << ',' << p.topic_i << ','
            << p.topic_j << ',' << format_double(p.kl) << ',' << format_double(p.js) << ','
            << format_double(p.jaccard) << '\n';
}

inline nlohmann::ordered_json similarity_aggregates_json(const SimilarityReport& rep) {
    auto agg = [](const SimilarityAggregate& a) {
        nlohmann::ordered_json j;
        j["pairs"] = a.pairs;
        j["mean_kl"] = a.mean_kl;
        j["mean_js"] = a.mean_js;
        j["mean_jaccard"] = a.mean_jaccard;
        j["similarity"] = a.similarity;
        if (a.spearman_jaccard_js)
            j["spearman_jaccard_js"] = {{"rho", a.spearman_jaccard_js->coefficient},
                                        {"p", a.spearman_jaccard_js->p_value},
                                        {"method", to_string(a.spearman_jaccard_js->method)}};
        return j;
    };
    nlohmann::ordered_json j;
    j["table_metric"] = rep.table_metric;
    j["topic_flagging"] = "heuristic-flagged";
    j["skipped_topics"] = rep.skipped_topics;
    j["by_period"] = nlohmann::ordered_json::object();
    for (const auto& [k, a] : rep.by_period) j["by_period"][k] = agg(a);
    j["by_month"] = nlohmann::ordered_json::object();
    for (const auto& [k, a] : rep.by_month) j["by_month"][k] = agg(a);
    j["warnings"] = rep.warnings;
    return j;
}

// ---------------------------------------------------------------------------
// Participation trend
// ---------------------------------------------------------------------------

struct TrendReport {
    struct WindowCount {
        std::size_t window;
        Date start;
        std::size_t participants;
    };
    struct MonthShare {
        std::string month;
        std::size_t participants;
        std::size_t active_users;
        double percentage;
    };
    std::vector<WindowCount> windows;
    std::vector<MonthShare> months;
};

/// Per window: distinct active users with at least one post whose most
/// probable topic (under that window's model) is flagged. Per month: those
/// users as a share of all active users posting that month.
/// `models[i]`/`flags[i]` belong to `windows[i]`; a null model means the
/// window was not fitted and contributes no participants.
inline TrendReport participation_trend(const std::vector<WindowedCorpus>& windows,
                                       const std::vector<const TopicModel*>& models,
                                       const std::vector<std::vector<bool>>& flags, long long min_posts) {
    if (models.size() != windows.size() || flags.size() != windows.size())
        throw ValidationError("participation_trend: one model and flag vector per window required");
    Corpus all;
    for (const auto& w : windows) all.posts.insert(all.posts.end(), w.corpus.posts.begin(), w.corpus.posts.end());
    const auto active = select_active_users(all, min_posts);

    TrendReport rep;
    std::map<std::string, std::set<std::string>> month_active, month_flagged;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        std::unordered_map<std::string, std::size_t> doc_row;
        if (models[w])
            for (std::size_t d = 0; d < models[w]->doc_ids.size(); ++d) doc_row[models[w]->doc_ids[d]] = d;
        std::set<std::string> participants;
        for (const auto& p : windows[w].corpus.posts) {
            if (!active.count(p.user_id)) continue;
            const auto month = p.date().month_key();
            month_active[month].insert(p.user_id);
            if (!models[w]) continue;
            const auto it = doc_row.find(p.id);
            if (it == doc_row.end()) continue;
            const auto topic = models[w]->argmax_topic(it->second);
            if (topic < flags[w].size() && flags[w][topic]) {
                participants.insert(p.user_id);
                month_flagged[month].insert(p.user_id);
            }
        }
        rep.windows.push_back({windows[w].window.index, windows[w].window.start, participants.size()});
    }
    for (const auto& [month, users] : month_active) {
        const std::size_t flagged = month_flagged.count(month) ? month_flagged[month].size() : 0;
        rep.months.push_back({month, flagged, users.size(),
                              users.empty() ? 0.0 : 100.0 * static_cast<double>(flagged) / static_cast<double>(users.size())});
    }
    return rep;
}

inline void write_trend_windows_csv(const TrendReport& rep, std::ostream& out) {
    out << "window,start,count\n";
    for (const auto& w : rep.windows) out << w.window << ',' << w.start.str() << ',' << w.participants << '\n';
}

inline void write_trend_months_csv(const TrendReport& rep, std::ostream& out) {
    out << "month,participants,active_users,percentage\n";
    for (const auto& m : rep.months)
        out << m.month << ',' << m.participants << ',' << m.active_users << ',' << format_double(m.percentage) << '\n';
}

// ---------------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------------

struct SvgSeries {
    std::string name;
    std::string color;
    std::vector<double> values;
};

/// Grouped bar chart, one group per label.
inline void write_bar_chart_svg(std::ostream& out, const std::string& title, const std::vector<std::string>& labels,
                                const std::vector<SvgSeries>& series) {
    const double width = 720, height = 360, left = 60, right = 20, top = 40, bottom = 60;
    double vmax = 0.0;
    for (const auto& s : series)
        for (double v : s.values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const double group_w = labels.empty() ? plot_w : plot_w / static_cast<double>(labels.size());
    const double bar_w = series.empty() ? group_w : group_w * 0.8 / static_cast<double>(series.size());
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = vmax * t / 4.0;
        const double y = top + plot_h - plot_h * t / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">%.3g</text>\n",
                      left - 4, y + 3, v);
        out << buf;
    }
    for (std::size_t g = 0; g < labels.size(); ++g) {
        const double gx = left + group_w * static_cast<double>(g) + group_w * 0.1;
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double v = g < series[s].values.size() ? series[s].values[g] : 0.0;
            const double h = plot_h * v / vmax;
            std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n",
                          gx + bar_w * static_cast<double>(s), top + plot_h - h, bar_w, h, series[s].color.c_str());
            out << buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">",
                      left + group_w * (static_cast<double>(g) + 0.5), top + plot_h + 14);
        out << buf << labels[g] << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = height - 20;
        const double x = left + 120.0 * static_cast<double>(s);
        std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>\n", x, y - 9,
                      series[s].color.c_str());
        out << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">", x + 14, y);
        out << buf << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace depsig
