#include "sbpnls/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "sbpnls/errors.hpp"

namespace sbpnls {

namespace {

constexpr double r(double num, double den) { return num / den; }

std::vector<double> row_sums(const Matrix& a) {
  std::vector<double> c;
  for (const auto& row : a) {
    double s = 0.0;
    for (double x : row) s += x;
    c.push_back(s);
  }
  return c;
}

ImexTableau finish(std::string name, int order, Matrix ae, Matrix ai, std::vector<double> be,
                   std::vector<double> bi) {
  ImexTableau t;
  t.name = std::move(name);
  t.order = order;
  t.stages = static_cast<int>(ae.size());
  t.c_explicit = row_sums(ae);
  t.c_implicit = row_sums(ai);
  t.a_explicit = std::move(ae);
  t.a_implicit = std::move(ai);
  t.b_explicit = std::move(be);
  t.b_implicit = std::move(bi);
  return t;
}

Matrix zeros(int s) { return Matrix(s, std::vector<double>(s, 0.0)); }

ImexTableau explicit_only(std::string name, int order, Matrix a, std::vector<double> b) {
  const int s = static_cast<int>(a.size());
  return finish(std::move(name), order, a, zeros(s), b, b);
}

ImexTableau make_rk4() {
  return explicit_only("rk4", 4,
                       {{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                       {r(1, 6), r(1, 3), r(1, 3), r(1, 6)});
}

ImexTableau make_heun() { return explicit_only("heun", 2, {{0, 0}, {1, 0}}, {0.5, 0.5}); }

// ARS(4,4,3): the L-stable third-order (4,4,3) pair
// with an explicit first stage.
ImexTableau make_ars343() {
  Matrix ae = {{0, 0, 0, 0, 0},
               {r(1, 2), 0, 0, 0, 0},
               {r(11, 18), r(1, 18), 0, 0, 0},
               {r(5, 6), r(-5, 6), r(1, 2), 0, 0},
               {r(1, 4), r(7, 4), r(3, 4), r(-7, 4), 0}};
  Matrix ai = {{0, 0, 0, 0, 0},
               {0, r(1, 2), 0, 0, 0},
               {0, r(1, 6), r(1, 2), 0, 0},
               {0, r(-1, 2), r(1, 2), r(1, 2), 0},
               {0, r(3, 2), r(-3, 2), r(1, 2), r(1, 2)}};
  std::vector<double> be = {r(1, 4), r(7, 4), r(3, 4), r(-7, 4), 0};
  std::vector<double> bi = {0, r(3, 2), r(-3, 2), r(1, 2), r(1, 2)};
  return finish("ars343", 3, std::move(ae), std::move(ai), std::move(be), std::move(bi));
}

// ARK4(3)7L[2]SA1.
ImexTableau make_kc43() {
  Matrix ae = {
      {0, 0, 0, 0, 0, 0, 0},
      {r(247, 1000), 0, 0, 0, 0, 0, 0},
      {r(247, 4000), r(2694949928731, 7487940209513), 0, 0, 0, 0, 0},
      {r(464650059369, 8764239774964), r(878889893998, 2444806327765), r(-952945855348, 12294611323341), 0, 0, 0, 0},
      {r(476636172619, 8159180917465), r(-1271469283451, 7793814740893), r(-859560642026, 4356155882851), r(1723805262919, 4571918432560), 0, 0, 0},
      {r(6338158500785, 11769362343261), r(-4970555480458, 10924838743837), r(3326578051521, 2647936831840), r(-880713585975, 1841400956686), r(-1428733748635, 8843423958496), 0, 0},
      {r(760814592956, 3276306540349), r(760814592956, 3276306540349), r(-47223648122716, 6934462133451), r(71187472546993, 9669769126921), r(-13330509492149, 9695768672337), r(11565764226357, 8513123442827), 0},
    };
  Matrix ai = {
      {0, 0, 0, 0, 0, 0, 0},
      {r(1235, 10000), r(1235, 10000), 0, 0, 0, 0, 0},
      {r(624185399699, 4186980696204), r(624185399699, 4186980696204), r(1235, 10000), 0, 0, 0, 0},
      {r(1258591069120, 10082082980243), r(1258591069120, 10082082980243), r(-322722984531, 8455138723562), r(1235, 10000), 0, 0, 0},
      {r(-436103496990, 5971407786587), r(-436103496990, 5971407786587), r(-2689175662187, 11046760208243), r(4431412449334, 12995360898505), r(1235, 10000), 0, 0},
      {r(-2207373168298, 14430576638973), r(-2207373168298, 14430576638973), r(242511121179, 3358618340039), r(3145666661981, 7780404714551), r(5882073923981, 14490790706663), r(1235, 10000), 0},
      {0, 0, r(9164257142617, 17756377923965), r(-10812980402763, 74029279521829), r(1335994250573, 5691609445217), r(2273837961795, 8368240463276), r(1235, 10000)},
    };
  std::vector<double> b = {0, 0, r(9164257142617, 17756377923965), r(-10812980402763, 74029279521829), r(1335994250573, 5691609445217), r(2273837961795, 8368240463276), r(1235, 10000)};
  return finish("kc43", 4, std::move(ae), std::move(ai), b, b);
}

// ARK5(4)8L[2]SA2.
ImexTableau make_kc54() {
  Matrix ae = {
      {0, 0, 0, 0, 0, 0, 0, 0},
      {r(4, 9), 0, 0, 0, 0, 0, 0, 0},
      {r(1, 9), r(1183333538310, 1827251437969), 0, 0, 0, 0, 0, 0},
      {r(895379019517, 9750411845327), r(477606656805, 13473228687314), r(-112564739183, 9373365219272), 0, 0, 0, 0, 0},
      {r(-4458043123994, 13015289567637), r(-2500665203865, 9342069639922), r(983347055801, 8893519644487), r(2185051477207, 2551468980502), 0, 0, 0, 0},
      {r(-167316361917, 17121522574472), r(1605541814917, 7619724128744), r(991021770328, 13052792161721), r(2342280609577, 11279663441611), r(3012424348531, 12792462456678), 0, 0, 0},
      {r(6680998715867, 14310383562358), r(5029118570809, 3897454228471), r(2415062538259, 6382199904604), r(-3924368632305, 6964820224454), r(-4331110370267, 15021686902756), r(-3944303808049, 11994238218192), 0, 0},
      {r(2193717860234, 3570523412979), r(2193717860234, 3570523412979), r(5952760925747, 18750164281544), r(-4412967128996, 6196664114337), r(4151782504231, 36106512998704), r(572599549169, 6265429158920), r(-457874356192, 11306498036315), 0},
    };
  Matrix ai = {
      {0, 0, 0, 0, 0, 0, 0, 0},
      {r(2, 9), r(2, 9), 0, 0, 0, 0, 0, 0},
      {r(2366667076620, 8822750406821), r(2366667076620, 8822750406821), r(2, 9), 0, 0, 0, 0, 0},
      {r(-257962897183, 4451812247028), r(-257962897183, 4451812247028), r(128530224461, 14379561246022), r(2, 9), 0, 0, 0, 0},
      {r(-486229321650, 11227943450093), r(-486229321650, 11227943450093), r(-225633144460, 6633558740617), r(1741320951451, 6824444397158), r(2, 9), 0, 0, 0},
      {r(621307788657, 4714163060173), r(621307788657, 4714163060173), r(-125196015625, 3866852212004), r(940440206406, 7593089888465), r(961109811699, 6734810228204), r(2, 9), 0, 0},
      {r(2036305566805, 6583108094622), r(2036305566805, 6583108094622), r(-3039402635899, 4450598839912), r(-1829510709469, 31102090912115), r(-286320471013, 6931253422520), r(8651533662697, 9642993110008), r(2, 9), 0},
      {0, 0, r(3517720773327, 20256071687669), r(4569610470461, 17934693873752), r(2819471173109, 11655438449929), r(3296210113763, 10722700128969), r(-1142099968913, 5710983926999), r(2, 9)},
    };
  std::vector<double> b = {0, 0, r(3517720773327, 20256071687669), r(4569610470461, 17934693873752), r(2819471173109, 11655438449929), r(3296210113763, 10722700128969), r(-1142099968913, 5710983926999), r(2, 9)};
  return finish("kc54", 5, std::move(ae), std::move(ai), b, b);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
  return y;
}

std::vector<double> hadamard(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * b[i];
  return y;
}

}  // namespace

bool ImexTableau::is_explicit() const {
  for (const auto& row : a_implicit)
    for (double x : row)
      if (x != 0.0) return false;
  return true;
}

bool ImexTableau::stiffly_accurate() const {
  return !is_explicit() && b_explicit == a_explicit.back() && b_implicit == a_implicit.back();
}

double ImexTableau::gamma() const {
  double g = 0.0;
  for (int i = 0; i < stages; ++i) g = std::max(g, a_implicit[i][i]);
  return g;
}

TableauDefects tableau_defects(const ImexTableau& t) {
  TableauDefects d;
  const auto ce = row_sums(t.a_explicit), ci = row_sums(t.a_implicit);
  for (int i = 0; i < t.stages; ++i)
    d.row_sums = std::max({d.row_sums, std::abs(ce[i] - t.c_explicit[i]),
                           std::abs(ci[i] - t.c_implicit[i])});
  const int p = std::min(t.order, 3);
  const std::vector<double> one(t.stages, 1.0);
  auto worst = [](double& acc, double v) { acc = std::max(acc, std::abs(v)); };

  struct Part {
    const Matrix* a;
    const std::vector<double>* b;
    const std::vector<double>* c;
  };
  const std::vector<Part> parts = {{&t.a_explicit, &t.b_explicit, &t.c_explicit},
                                   {&t.a_implicit, &t.b_implicit, &t.c_implicit}};
  for (const Part& x : parts) {
    if (x.a == &t.a_implicit && t.is_explicit()) continue;
    worst(d.order_conditions, dot(*x.b, one) - 1.0);
    if (p >= 2) worst(d.order_conditions, dot(*x.b, *x.c) - 0.5);
    if (p >= 3) {
      worst(d.order_conditions, dot(*x.b, hadamard(*x.c, *x.c)) - 1.0 / 3.0);
      worst(d.order_conditions, dot(*x.b, mat_vec(*x.a, *x.c)) - 1.0 / 6.0);
    }
  }
  if (!t.is_explicit()) {
    for (const Part& bp : parts)
      for (const Part& cp : parts) {
        if (p >= 2) worst(d.coupling, dot(*bp.b, *cp.c) - 0.5);
        if (p >= 3) {
          for (const Part& cq : parts) worst(d.coupling, dot(*bp.b, hadamard(*cp.c, *cq.c)) - 1.0 / 3.0);
          for (const Part& ap : parts) worst(d.coupling, dot(*bp.b, mat_vec(*ap.a, *cp.c)) - 1.0 / 6.0);
        }
      }
  }
  return d;
}

void validate_tableau(const ImexTableau& t, double tol) {
  const auto s = static_cast<std::size_t>(t.stages);
  auto square = [s](const Matrix& a) {
    return a.size() == s && std::all_of(a.begin(), a.end(), [s](const auto& r) { return r.size() == s; });
  };
  if (t.stages < 1 || !square(t.a_explicit) || !square(t.a_implicit) || t.b_explicit.size() != s ||
      t.b_implicit.size() != s || t.c_explicit.size() != s || t.c_implicit.size() != s)
    throw InvalidArgument("tableau '" + t.name + "': inconsistent dimensions");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i; j < s; ++j) {
      if (t.a_explicit[i][j] != 0.0)
        throw InvalidArgument("tableau '" + t.name + "': explicit part is not strictly lower triangular");
      if (j > i && t.a_implicit[i][j] != 0.0)
        throw InvalidArgument("tableau '" + t.name + "': implicit part is not lower triangular");
    }
  const TableauDefects d = tableau_defects(t);
  if (d.row_sums > tol || d.order_conditions > tol || d.coupling > tol)
    throw InvalidArgument("tableau '" + t.name + "' violates its order conditions (row sums " +
                          std::to_string(d.row_sums) + ", order " +
                          std::to_string(d.order_conditions) + ", coupling " +
                          std::to_string(d.coupling) + ")");
}

const ImexTableau& tableau_by_name(std::string_view name) {
  static std::mutex mutex;
  static std::map<std::string, ImexTableau, std::less<>> registry;
  std::lock_guard lock(mutex);
  if (auto it = registry.find(name); it != registry.end()) return it->second;
  ImexTableau t;
  if (name == "rk4") t = make_rk4();
  else if (name == "heun") t = make_heun();
  else if (name == "ars343") t = make_ars343();
  else if (name == "kc43") t = make_kc43();
  else if (name == "kc54") t = make_kc54();
  else throw InvalidArgument("unknown tableau '" + std::string(name) + "'");
  validate_tableau(t);
  return registry.emplace(std::string(name), std::move(t)).first->second;
}

std::vector<std::string> tableau_names() { return {"rk4", "heun", "ars343", "kc43", "kc54"}; }

}  // namespace sbpnls
