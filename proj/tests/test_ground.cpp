#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "holorepair/errors.hpp"
#include "holorepair/ground.hpp"
#include "support/fixtures.hpp"

using namespace holorepair;

namespace {

struct Pipeline4 {
    Dataset ds;
    std::vector<DenialConstraint> dcs;
    ConflictHypergraph graph;
    DetectionResult det;
    CoocTable cooc;
    DomainMap domains;

    explicit Pipeline4(const std::string& dc_text, double tau = 0.5)
        : ds(Dataset::from_csv_text(fixtures::kInspectionsCsv)),
          dcs(parse_dc_file(dc_text)),
          cooc(CoocTable::build(ds)) {
        auto [violations, g] = detect_violations(ds, dcs);
        graph = g;
        det = split_noisy_clean(ds, graph);
        domains = prune_domain(ds, cooc, det.noisy, tau);
    }
};

// Independent union-find over hyperedge tuple sets.
struct UnionFind {
    std::map<int, int> parent;
    int find(int x) {
        parent.emplace(x, x);
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::set<std::set<int>> oracle_groups(const ConflictHypergraph& graph, int constraint) {
    UnionFind uf;
    std::set<int> rows;
    for (const auto& e : graph.edges) {
        if (e.constraint != constraint) continue;
        int first = e.cells[0].row;
        for (const Cell& c : e.cells) {
            rows.insert(c.row);
            uf.unite(first, c.row);
        }
    }
    std::map<int, std::set<int>> comp;
    for (int r : rows) comp[uf.find(r)].insert(r);
    std::set<std::set<int>> out;
    for (auto& [root, members] : comp) out.insert(members);
    return out;
}

}  // namespace

TEST_CASE("tuple groups are the connected components per constraint") {
    Pipeline4 p(fixtures::kDcNameZip + "\n" + fixtures::kDcZipCity);
    PartitionPlan plan = partition_groups(p.graph, p.dcs.size());
    REQUIRE(plan.groups.size() == 2);
    CHECK(plan.groups[0].constraint == 0);
    CHECK(plan.groups[0].rows == std::vector<int>{0, 1, 2});  // merged via shared row 1
    CHECK(plan.groups[1].constraint == 1);
    CHECK(plan.groups[1].rows == std::vector<int>{0, 3});

    SUBCASE("matches an independent union-find oracle") {
        for (std::size_t k = 0; k < p.dcs.size(); ++k) {
            std::set<std::set<int>> got;
            for (const auto& g : plan.groups)
                if (g.constraint == static_cast<int>(k))
                    got.insert(std::set<int>(g.rows.begin(), g.rows.end()));
            CHECK(got == oracle_groups(p.graph, static_cast<int>(k)));
        }
    }
}

TEST_CASE("empty hypergraph gives an empty plan") {
    ConflictHypergraph empty;
    CHECK(partition_groups(empty, 3).groups.empty());
}

TEST_CASE("groups match the union-find oracle on random hypergraphs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        ConflictHypergraph g;
        int n_constraints = 1 + static_cast<int>(rng() % 3);
        int n_edges = static_cast<int>(rng() % 10);
        for (int e = 0; e < n_edges; ++e) {
            Hyperedge edge;
            edge.constraint = static_cast<int>(rng() % n_constraints);
            int cells = 2 + static_cast<int>(rng() % 3);
            for (int c = 0; c < cells; ++c)
                edge.cells.push_back({static_cast<int>(rng() % 8), static_cast<int>(rng() % 3)});
            g.edges.push_back(edge);
        }
        PartitionPlan plan = partition_groups(g, n_constraints);
        for (int k = 0; k < n_constraints; ++k) {
            std::set<std::set<int>> got;
            std::set<int> seen;
            for (const auto& grp : plan.groups) {
                if (grp.constraint != k) continue;
                got.insert(std::set<int>(grp.rows.begin(), grp.rows.end()));
                for (int r : grp.rows) CHECK(seen.insert(r).second);  // tuple-disjoint
            }
            CHECK(got == oracle_groups(g, k));
        }
    }
}

TEST_CASE("build_variables splits evidence and query") {
    Pipeline4 p(fixtures::kDcNameZip + "\n" + fixtures::kDcZipCity);
    auto vars = build_variables(p.ds, p.det, p.domains);
    CHECK(vars.size() == 24);
    std::size_t query = 0;
    for (const auto& v : vars)
        if (v.is_query) ++query;
    CHECK(query <= 9);
    // rows 2 and 3 share zip 60609 and name J.V.Sr. only, so their name
    // cells collapse to singletons at tau 0.5; the other 7 stay open
    CHECK(query == 7);

    int name = p.ds.attribute_index("DBAName");
    int zip = p.ds.attribute_index("Zip");
    const Variable& name2 = vars[1 * 6 + name];
    CHECK_FALSE(name2.is_query);  // noisy but singleton: demoted to evidence
    const Variable& zip1 = vars[0 * 6 + zip];
    CHECK(zip1.is_query);
    CHECK(zip1.candidates.size() == 2);

    SUBCASE("clean cells are evidence at their observed value") {
        int aka = p.ds.attribute_index("AKAName");
        const Variable& v = vars[aka];
        CHECK_FALSE(v.is_query);
        CHECK(v.observed == Value("Johnnyo's"));
    }
    SUBCASE("noisy cell without a domain is an error") {
        DomainMap missing;
        CHECK_THROWS_AS(build_variables(p.ds, p.det, missing), ContractError);
    }
}

TEST_CASE("singleton demotion at a high threshold") {
    Pipeline4 p(fixtures::kDcZipCity, /*tau=*/0.7);
    auto vars = build_variables(p.ds, p.det, p.domains);
    int zip = p.ds.attribute_index("Zip");
    CHECK_FALSE(vars[0 * 6 + zip].is_query);  // domain {60608} at tau 0.7
}

TEST_CASE("feature extraction counts for one query zip cell") {
    Pipeline4 p(fixtures::kDcNameZip + "\n" + fixtures::kDcZipCity);
    auto vars = build_variables(p.ds, p.det, p.domains);
    WeightTable w;
    auto factors = extract_features(p.ds, vars, {}, w);

    int zip = p.ds.attribute_index("Zip");
    int zip1_id = 0 * 6 + zip;
    std::size_t cooc = 0, prior = 0;
    for (const auto& f : factors) {
        if (f.vars[0] != zip1_id) continue;
        if (f.kind == FactorKind::Cooc) ++cooc;
        if (f.kind == FactorKind::Prior) ++prior;
    }
    // 2 candidates x 5 co-attributes
    CHECK(cooc == 10);
    CHECK(prior == 1);

    SUBCASE("evidence variables carry no factors") {
        int aka = p.ds.attribute_index("AKAName");
        for (const auto& f : factors) CHECK(f.vars[0] != 0 * 6 + aka);
    }
    SUBCASE("dict factors activate the matched candidate") {
        std::vector<MatchedFact> facts{{Cell{0, zip}, "60608", "addr"}};
        WeightTable w2;
        auto with_dict = extract_features(p.ds, vars, facts, w2);
        bool found = false;
        for (const auto& f : with_dict) {
            if (f.kind != FactorKind::Dict) continue;
            CHECK(f.vars[0] == zip1_id);
            const Variable& var = vars[zip1_id];
            REQUIRE(f.active.size() == 1);
            CHECK(var.candidates[f.active[0]] == "60608");
            found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("provenance becomes a source feature") {
    LoadOptions opts;
    opts.provenance_column = "src";
    Dataset ds = Dataset::from_csv_text("A,B,src\nx,1,feedA\nx,2,feedB\ny,1,feedA\nx,2,feedA\n",
                                        opts);
    auto dcs = parse_dc_file("t1&t2&EQ(t1.A,t2.A)&IQ(t1.B,t2.B)");
    auto [violations, graph] = detect_violations(ds, dcs);
    DetectionResult det = split_noisy_clean(ds, graph);
    CoocTable cooc = CoocTable::build(ds);
    DomainMap domains = prune_domain(ds, cooc, det.noisy, 0.0);
    auto vars = build_variables(ds, det, domains);

    WeightTable w;
    auto factors = extract_features(ds, vars, {}, w);
    bool found_src = false;
    for (const auto& f : factors) {
        if (f.kind != FactorKind::Cooc) continue;
        if (w.signature(f.weight).find("__src__|feedA") != std::string::npos) found_src = true;
    }
    CHECK(found_src);

    SUBCASE("each candidate gets one factor per co-cell plus the source") {
        int b = ds.attribute_index("B");
        const Variable& v = vars[0 * 2 + b];  // row 1's B cell
        REQUIRE(v.is_query);
        std::size_t cooc_factors = 0;
        for (const auto& f : factors)
            if (f.kind == FactorKind::Cooc && f.vars[0] == v.id) ++cooc_factors;
        // (1 co-attribute + 1 source feature) x |candidates|
        CHECK(cooc_factors == 2 * v.candidates.size());
    }
}

TEST_CASE("relax_dc on an FD-style constraint yields two deduplicated rules") {
    DenialConstraint dc = parse_dc(fixtures::kDcZipState);
    auto rules = relax_dc(dc, 0);
    REQUIRE(rules.size() == 2);
    // one rule per predicate position, targets on t1 after canonicalization
    CHECK(rules[0].predicate_pos == 0);
    CHECK(rules[0].target_attr == "Zip");
    CHECK(rules[0].viol_op == Op::EQ);
    CHECK(rules[0].other_slot == 1);
    CHECK(rules[0].other_attr == "Zip");
    REQUIRE(rules[0].body.size() == 1);
    CHECK(rules[0].body[0].op == Op::IQ);
    CHECK(rules[1].predicate_pos == 1);
    CHECK(rules[1].target_attr == "State");
    CHECK(rules[1].viol_op == Op::IQ);
}

TEST_CASE("relax_dc on an arity-1 constant constraint yields one rule") {
    DenialConstraint dc = parse_dc("t1&EQ(t1.State,\"XX\")");
    auto rules = relax_dc(dc, 0);
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].target_attr == "State");
    CHECK(rules[0].other_slot == -1);
    CHECK(rules[0].other_const == Value("XX"));
    CHECK(rules[0].body.empty());
}

TEST_CASE("a K-predicate symmetric constraint relaxes to K rules") {
    DenialConstraint dc = parse_dc(fixtures::kDcAddrZip);  // 4 predicates, 8 cell refs
    auto rules = relax_dc(dc, 0);
    CHECK(rules.size() == 4);
    std::set<int> positions;
    for (const auto& r : rules) positions.insert(r.predicate_pos);
    CHECK(positions == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("asymmetric predicates keep both orientations but share the weight position") {
    DenialConstraint dc = parse_dc("t1&t2&EQ(t1.A,t2.A)&LT(t1.B,t2.B)");
    auto rules = relax_dc(dc, 0);
    // the ordering predicate breaks the t1/t2 symmetry, so nothing dedups;
    // the two orientations of each position still tie their weights
    CHECK(rules.size() == 4);
    std::multiset<int> positions;
    for (const auto& r : rules) positions.insert(r.predicate_pos);
    CHECK(positions == std::multiset<int>{0, 0, 1, 1});
}

TEST_CASE("hard grounding for one conflicting pair") {
    Pipeline4 p(fixtures::kDcZipCity);
    auto vars = build_variables(p.ds, p.det, p.domains);
    PartitionPlan plan = partition_groups(p.graph, p.dcs.size());
    REQUIRE(plan.groups.size() == 1);

    GroundConfig cfg;
    cfg.mode = GroundMode::Factors;
    WeightTable w;
    std::vector<HardBinding> bindings;
    GroundStats stats;
    auto factors = ground_factors(p.ds, vars, p.dcs, {}, plan, cfg, w, bindings, stats);

    REQUIRE(stats.hard == 1);
    const Factor& f = factors[0];
    CHECK(f.kind == FactorKind::HardDC);
    int zip = p.ds.attribute_index("Zip");
    int city = p.ds.attribute_index("City");
    std::set<int> expect{0 * 6 + zip, 0 * 6 + city, 3 * 6 + zip, 3 * 6 + city};
    CHECK(std::set<int>(f.vars.begin(), f.vars.end()) == expect);
    CHECK(stats.hard <= stats.hard_pair_bound);
    CHECK(w.value(f.weight) == 10.0);

    SUBCASE("factor count equals within-group pairs when nothing is skipped") {
        std::size_t pairs = 0;
        for (const auto& g : plan.groups) pairs += g.rows.size() * (g.rows.size() - 1) / 2;
        CHECK(stats.hard + stats.hard_skipped == pairs);
    }
}

TEST_CASE("relaxed grounding instantiates the example pattern on the sample") {
    Pipeline4 p(fixtures::kDcZipCity);
    auto vars = build_variables(p.ds, p.det, p.domains);
    PartitionPlan plan = partition_groups(p.graph, p.dcs.size());
    auto rules = relax_dc(p.dcs[0], 0);

    GroundConfig cfg;  // feats
    WeightTable w;
    std::vector<HardBinding> bindings;
    GroundStats stats;
    auto factors = ground_factors(p.ds, vars, p.dcs, rules, plan, cfg, w, bindings, stats);

    int city = p.ds.attribute_index("City");
    // factor on row-1 City penalizing candidates != "Cicago" (initial zips
    // equal, partner's city is Cicago), and symmetrically on row-4 City
    bool on_t1 = false, on_t4 = false;
    for (const auto& f : factors) {
        if (f.kind != FactorKind::RelaxedDC) continue;
        const Variable& var = vars[f.vars[0]];
        if (f.vars[0] == 0 * 6 + city) {
            REQUIRE(f.active.size() == 1);
            CHECK(var.candidates[f.active[0]] == "Chicago");  // != Cicago
            on_t1 = true;
        }
        if (f.vars[0] == 3 * 6 + city) {
            REQUIRE(f.active.size() == 1);
            CHECK(var.candidates[f.active[0]] == "Cicago");  // != Chicago
            on_t4 = true;
        }
    }
    CHECK(on_t1);
    CHECK(on_t4);

    SUBCASE("feats mode grounds only unary factors") {
        for (const auto& f : factors) CHECK(f.vars.size() == 1);
    }
    SUBCASE("no factor references an out-of-domain candidate") {
        for (const auto& f : factors) {
            const Variable& var = vars[f.vars[0]];
            for (int d : f.active) {
                CHECK(d >= 0);
                CHECK(d < static_cast<int>(var.candidates.size()));
            }
        }
    }
}

TEST_CASE("empty plan leaves only feature factors") {
    Pipeline4 p(fixtures::kDcZipCity);
    PartitionPlan empty;
    GroundConfig cfg;
    cfg.mode = GroundMode::Both;
    FactorGraph g = ground(p.ds, p.det, p.domains, p.dcs, empty, {}, cfg);
    CHECK(g.stats.hard == 0);
    CHECK(g.stats.relaxed == 0);
    CHECK(g.stats.cooc > 0);
}

TEST_CASE("grounding is deterministic") {
    Pipeline4 p(fixtures::kDcFile);
    PartitionPlan plan = partition_groups(p.graph, p.dcs.size());
    GroundConfig cfg;
    cfg.mode = GroundMode::Both;
    FactorGraph a = ground(p.ds, p.det, p.domains, p.dcs, plan, {}, cfg);
    FactorGraph b = ground(p.ds, p.det, p.domains, p.dcs, plan, {}, cfg);
    REQUIRE(a.factors.size() == b.factors.size());
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
        CHECK(a.factors[i].kind == b.factors[i].kind);
        CHECK(a.factors[i].vars == b.factors[i].vars);
        CHECK(a.factors[i].active == b.factors[i].active);
        CHECK(a.weights.signature(a.factors[i].weight) ==
              b.weights.signature(b.factors[i].weight));
    }
}

TEST_CASE("training set construction") {
    Pipeline4 p(fixtures::kDcNameZip + "\n" + fixtures::kDcZipCity);
    std::vector<RelaxedRule> rules;
    for (std::size_t k = 0; k < p.dcs.size(); ++k) {
        auto rs = relax_dc(p.dcs[k], static_cast<int>(k));
        rules.insert(rules.end(), rs.begin(), rs.end());
    }
    WeightTable w;
    TrainingConfig cfg;
    auto examples = build_training_set(p.ds, p.cooc, p.det, rules, {}, cfg, w);

    // eligible clean cells: attribute needs >= 2 active-domain values; on the
    // sample only DBAName and City qualify and only row 4's DBAName is clean
    // with a multi-valued attribute (City cells of rows 2,3 are clean too)
    for (const auto& ex : examples) {
        CHECK(p.ds.active_domain(ex.cell.col).size() >= 2);
        CHECK_FALSE(p.det.is_noisy(ex.cell));
        REQUIRE(ex.label >= 0);
        CHECK(Value(ex.candidates[ex.label]) == p.ds.value(ex.cell));
    }
    CHECK(examples.size() == 3);

    SUBCASE("cap subsamples deterministically") {
        TrainingConfig capped = cfg;
        capped.cap = 2;
        auto a = build_training_set(p.ds, p.cooc, p.det, rules, {}, capped, w);
        auto b = build_training_set(p.ds, p.cooc, p.det, rules, {}, capped, w);
        REQUIRE(a.size() == 2);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].cell == b[i].cell);
    }
}
