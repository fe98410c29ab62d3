#include "bralpha/bessel.hpp"
#include "bralpha/errors.hpp"

#include <array>
#include <cmath>
#include <limits>

// Midrange Chebyshev fits are the SLATEC FNLIB expansions for the
// exponentially scaled K0/K1 (Fullerton, public domain): series AK0/AK02
// on 2<x<=8 / x>8 and AK1/AK12 likewise.

namespace bralpha {
namespace {

constexpr double pi = 3.14159265358979323846264338328;

const double ak0cs[38] = {
    -0.07643947903327941424082978270088,
    -0.02235652605699819052023095550791,
    7.734181154693858235300618174047e-4,
    -4.281006688886099464452146435416e-5,
    3.08170017386297474365001482666e-6,
    -2.639367222009664974067448892723e-7,
    2.563713036403469206294088265742e-8,
    -2.742705549900201263857211915244e-9,
    3.169429658097499592080832873403e-10,
    -3.902353286962184141601065717962e-11,
    5.068040698188575402050092127286e-12,
    -6.889574741007870679541713557984e-13,
    9.744978497825917691388201336831e-14,
    -1.427332841884548505389855340122e-14,
    2.156412571021463039558062976527e-15,
    -3.34965425514956277218878205853e-16,
    5.335260216952911692145280392601e-17,
    -8.693669980890753807639622378837e-18,
    1.446404347862212227887763442346e-18,
    -2.452889825500129682404678751573e-19,
    4.2337545262321715728217063424e-20,
    -7.427946526454464195695341294933e-21,
    1.3231505293926668662779674624e-21,
    -2.390587164739649451335981465599e-22,
    4.376827585923226140165712554666e-23,
    -8.113700607345118059339011413333e-24,
    1.521819913832172958310378154666e-24,
    -2.886041941483397770235958613333e-25,
    5.530620667054717979992610133333e-26,
    -1.070377329249898728591633066666e-26,
    2.091086893142384300296328533333e-27,
    -4.121713723646203827410261333333e-28,
    8.19348397112130764013568e-29,
    -1.642000275459297726780757333333e-29,
    3.316143281480227195890346666666e-30,
    -6.746863644145295941085866666666e-31,
    1.382429146318424677635413333333e-31,
    -2.851874167359832570811733333333e-32
};
const double ak02cs[33] = {
    -0.01201869826307592239839346212452,
    -0.009174852691025695310652561075713,
    1.444550931775005821048843878057e-4,
    -4.013614175435709728671021077879e-6,
    1.567831810852310672590348990333e-7,
    -7.77011043852173771031579975446e-9,
    4.611182576179717882533130529586e-10,
    -3.158592997860565770526665803309e-11,
    2.435018039365041127835887814329e-12,
    -2.074331387398347897709853373506e-13,
    1.925787280589917084742736504693e-14,
    -1.927554805838956103600347182218e-15,
    2.062198029197818278285237869644e-16,
    -2.341685117579242402603640195071e-17,
    2.805902810643042246815178828458e-18,
    -3.530507631161807945815482463573e-19,
    4.645295422935108267424216337066e-20,
    -6.368625941344266473922053461333e-21,
    9.0695213109865155676223488e-22,
    -1.337974785423690739845005311999e-22,
    2.03983602185995231552208896e-23,
    -3.207027481367840500060869973333e-24,
    5.189744413662309963626359466666e-25,
    -8.629501497540572192964607999999e-26,
    1.4721611831025598552080384e-26,
    -2.573069023867011283812351999999e-27,
    4.60177408664351658737664e-28,
    -8.411555324201093737130666666666e-29,
    1.569806306635368939301546666666e-29,
    -2.988226453005757788979199999999e-30,
    5.796831375216836520618666666666e-31,
    -1.145035994347681332155733333333e-31,
    2.301266594249682802005333333333e-32
};
const double ak1cs[38] = {
    0.27443134069738829695257666227266,
    0.07571989953199367817089237814929,
    -0.0014410515564754061229853116175625,
    6.6501169551257479394251385477036e-5,
    -4.3699847095201407660580845089167e-6,
    3.5402774997630526799417139008534e-7,
    -3.3111637792932920208982688245704e-8,
    3.4459775819010534532311499770992e-9,
    -3.8989323474754271048981937492758e-10,
    4.7208197504658356400947449339005e-11,
    -6.047835662875356234537359156289e-12,
    8.1284948748658747888193837985663e-13,
    -1.1386945747147891428923915951042e-13,
    1.654035840846228232597294820509e-14,
    -2.4809025677068848221516010440533e-15,
    3.8292378907024096948429227299157e-16,
    -6.0647341040012418187768210377386e-17,
    9.8324256232648616038194004650666e-18,
    -1.6284168738284380035666620115626e-18,
    2.7501536496752623718284120337066e-19,
    -4.7289666463953250924281069568e-20,
    8.2681500028109932722392050346666e-21,
    -1.4681405136624956337193964885333e-21,
    2.6447639269208245978085894826666e-22,
    -4.82901575648563878979698688e-23,
    8.9293020743610130180656332799999e-24,
    -1.6708397168972517176997751466666e-24,
    3.1616456034040694931368618666666e-25,
    -6.0462055312274989106506410666666e-26,
    1.1678798942042732700718421333333e-26,
    -2.277374158265399623286784e-27,
    4.4811097300773675795305813333333e-28,
    -8.8932884769020194062336e-29,
    1.7794680018850275131392e-29,
    -3.5884555967329095821994666666666e-30,
    7.2906290492694257991679999999999e-31,
    -1.4918449845546227073024e-31,
    3.0736573872934276300799999999999e-32
};
const double ak12cs[33] = {
    0.06379308343739001036600488534102,
    0.02832887813049720935835030284708,
    -2.475370673905250345414545566732e-4,
    5.771972451607248820470976625763e-6,
    -2.068939219536548302745533196552e-7,
    9.739983441381804180309213097887e-9,
    -5.585336140380624984688895511129e-10,
    3.732996634046185240221212854731e-11,
    -2.825051961023225445135065754928e-12,
    2.372019002484144173643496955486e-13,
    -2.176677387991753979268301667938e-14,
    2.157914161616032453939562689706e-15,
    -2.290196930718269275991551338154e-16,
    2.582885729823274961919939565226e-17,
    -3.07675264126846318762109817344e-18,
    3.851487721280491597094896844799e-19,
    -5.0447948976415289771172825088e-20,
    6.888673850418544237018292223999e-21,
    -9.77504154195011830300213248e-22,
    1.437416218523836461001659733333e-22,
    -2.185059497344347373499733333333e-23,
    3.4262456218092206316453888e-24,
    -5.531064394246408232501248e-25,
    9.176601505685995403782826666666e-26,
    -1.562287203618024911448746666666e-26,
    2.725419375484333132349439999999e-27,
    -4.865674910074827992378026666666e-28,
    8.879388552723502587357866666666e-29,
    -1.654585918039257548936533333333e-29,
    3.145111321357848674303999999999e-30,
    -6.092998312193127612416e-31,
    1.202021939369815834623999999999e-31,
    -2.412930801459408841386666666666e-32
};
constexpr int ntak0 = 18, ntak02 = 14, ntak1 = 18, ntak12 = 14;

double csevl(double x, const double* cs, int n)
{
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    const double twox = 2.0 * x;
    for (int i = n - 1; i >= 0; --i) {
        b2 = b1;
        b1 = b0;
        b0 = twox * b1 - b2 + cs[i];
    }
    return 0.5 * (b0 - b2);
}

// Ascending-series coefficient tables, k = 0..kmax:
//   inv_sq_fact[k]  = 1/(k!)^2
//   harmonic[k]     = H_k
//   c1[k]           = 1/(k! (k+1)!)
//   a1[k]           = psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma_E
constexpr int kmax = 24;

struct SeriesTables {
    std::array<double, kmax + 1> inv_sq_fact{}, harmonic{}, c1{}, a1{};
    SeriesTables()
    {
        double fact = 1.0, h = 0.0;
        for (int k = 0; k <= kmax; ++k) {
            if (k > 0) {
                fact *= k;
                h += 1.0 / k;
            }
            inv_sq_fact[k] = 1.0 / (fact * fact);
            harmonic[k] = h;
            c1[k] = inv_sq_fact[k] / (k + 1);
            a1[k] = h + (h + 1.0 / (k + 1)) - 2.0 * euler_gamma;
        }
    }
};
const SeriesTables tab;

void check_domain(double x, const char* fn)
{
    if (!(x > 0.0))
        throw std::domain_error(std::string(fn) + ": argument must be positive");
}

// K0 on (0, 2]:  -(log(x/2)+gamma) I0(x) + sum_{k>=1} H_k (x^2/4)^k / (k!)^2
double k0_series(double x)
{
    const double t = 0.25 * x * x;
    double tk = 1.0, i0 = 1.0, s = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        tk *= t;
        const double c = tk * tab.inv_sq_fact[k];
        i0 += c;
        s += c * tab.harmonic[k];
        if (c < 1e-18)
            break;
    }
    return -(std::log(0.5 * x) + euler_gamma) * i0 + s;
}

// 1 - x K1(x) on [0, 2]:  t * sum c1_k t^k (a1_k - log t),  t = x^2/4
double k1_deficit_series(double x)
{
    if (x == 0.0)
        return 0.0;
    const double t = 0.25 * x * x;
    const double lt = std::log(t);
    double tk = 1.0, s = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        const double c = tk * tab.c1[k];
        s += c * (tab.a1[k] - lt);
        if (k > 2 && c < 1e-19)
            break;
        tk *= t;
    }
    return t * s;
}

// e^x K_nu(x) for x above the asymptotic cutoff; mu = 4 nu^2.
double k_asymptotic_scaled(double x, double mu)
{
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double m = 2.0 * k - 1.0;
        const double next = term * (mu - m * m) / (8.0 * x * k);
        if (std::abs(next) >= std::abs(term))
            break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum))
            break;
    }
    return std::sqrt(pi / (2.0 * x)) * sum;
}

const BesselEvalPolicy policy{};

} // namespace

const BesselEvalPolicy& bessel_policy() { return policy; }

double bessel_k0_scaled(double x)
{
    check_domain(x, "bessel_k0_scaled");
    if (x <= policy.series_cutoff)
        return std::exp(x) * k0_series(x);
    if (x <= 8.0)
        return (csevl((16.0 / x - 5.0) / 3.0, ak0cs, ntak0) + 1.25) / std::sqrt(x);
    if (x <= policy.asymptotic_cutoff)
        return (csevl(16.0 / x - 1.0, ak02cs, ntak02) + 1.25) / std::sqrt(x);
    return k_asymptotic_scaled(x, 0.0);
}

double bessel_k1_scaled(double x)
{
    check_domain(x, "bessel_k1_scaled");
    if (x <= policy.series_cutoff)
        return std::exp(x) * (1.0 - bessel_k1_deficit(x)) / x;
    if (x <= 8.0)
        return (csevl((16.0 / x - 5.0) / 3.0, ak1cs, ntak1) + 1.25) / std::sqrt(x);
    if (x <= policy.asymptotic_cutoff)
        return (csevl(16.0 / x - 1.0, ak12cs, ntak12) + 1.25) / std::sqrt(x);
    return k_asymptotic_scaled(x, 4.0);
}

double bessel_k0(double x)
{
    check_domain(x, "bessel_k0");
    if (x <= policy.series_cutoff)
        return k0_series(x);
    return std::exp(-x) * bessel_k0_scaled(x); // exact 0 once e^{-x} underflows
}

double bessel_k1(double x)
{
    check_domain(x, "bessel_k1");
    if (x <= policy.series_cutoff)
        return (1.0 - bessel_k1_deficit(x)) / x;
    return std::exp(-x) * bessel_k1_scaled(x);
}

std::pair<double, double> bessel_k0_k1_scaled(double x)
{
    return {bessel_k0_scaled(x), bessel_k1_scaled(x)};
}

double bessel_k0_plus_log(double x)
{
    if (x < 0.0 || std::isnan(x))
        throw std::domain_error("bessel_k0_plus_log: argument must be nonnegative");
    constexpr double log2_minus_gamma = 0.69314718055994530942 - euler_gamma;
    if (x == 0.0)
        return log2_minus_gamma;
    if (x <= policy.series_cutoff) {
        // (log(x/2)+gamma)(1 - I0) + S + log2 - gamma; no cancellation since
        // both log factors multiply O(x^2) series.
        const double t = 0.25 * x * x;
        double tk = 1.0, i0m1 = 0.0, s = 0.0;
        for (int k = 1; k <= kmax; ++k) {
            tk *= t;
            const double c = tk * tab.inv_sq_fact[k];
            i0m1 += c;
            s += c * tab.harmonic[k];
            if (c < 1e-18)
                break;
        }
        return -(std::log(0.5 * x) + euler_gamma) * i0m1 + s + log2_minus_gamma;
    }
    return bessel_k0(x) + std::log(x);
}

double bessel_k1_deficit(double x)
{
    if (x < 0.0 || std::isnan(x))
        throw std::domain_error("bessel_k1_deficit: argument must be nonnegative");
    if (x <= policy.series_cutoff)
        return k1_deficit_series(x);
    return 1.0 - x * bessel_k1(x); // x K1(x) <= 0.28 here, no cancellation
}

} // namespace bralpha
