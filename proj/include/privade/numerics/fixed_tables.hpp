#pragma once

// Generated by tools/gen_fixed_tables.py. Do not edit by hand.

#include <array>
#include <cstdint>

namespace privade::numerics::tables {

inline constexpr std::int64_t kLn2Q30 = 744261118;

inline constexpr std::int64_t kLog2eQ30 = 1549082005;

// ln(1 + j/256) in Q2.30, j = 0..256.

inline constexpr std::array<std::int64_t, 257> kLnMantissaQ30 = {
    0, 4186133, 8356010, 12509755, 16647494, 20769348,
    24875440, 28965890, 33040817, 37100337, 41144567, 45173622,
    49187615, 53186658, 57170862, 61140337, 65095192, 69035533,
    72961468, 76873100, 80770534, 84653872, 88523216, 92378666,
    96220323, 100048283, 103862646, 107663506, 111450959, 115225099,
    118986020, 122733814, 126468572, 130190384, 133899340, 137595529,
    141279038, 144949954, 148608363, 152254349, 155887996, 159509388,
    163118608, 166715736, 170300854, 173874042, 177435378, 180984941,
    184522808, 188049057, 191563764, 195067003, 198558849, 202039377,
    205508659, 208966767, 212413774, 215849751, 219274768, 222688894,
    226092199, 229484751, 232866618, 236237867, 239598564, 242948775,
    246288566, 249618000, 252937143, 256246057, 259544806, 262833451,
    266112055, 269380678, 272639381, 275888224, 279127266, 282356568,
    285576186, 288786179, 291986604, 295177518, 298358977, 301531038,
    304693756, 307847185, 310991380, 314126395, 317252283, 320369097,
    323476891, 326575715, 329665621, 332746662, 335818887, 338882346,
    341937090, 344983168, 348020629, 351049522, 354069895, 357081796,
    360085271, 363080369, 366067135, 369045617, 372015859, 374977907,
    377931807, 380877602, 383815338, 386745058, 389666807, 392580626,
    395486560, 398384650, 401274940, 404157470, 407032282, 409899418,
    412758919, 415610824, 418455175, 421292011, 424121372, 426943297,
    429757825, 432564995, 435364845, 438157413, 440942737, 443720854,
    446491803, 449255618, 452012338, 454761999, 457504636, 460240285,
    462968983, 465690763, 468405662, 471113713, 473814952, 476509412,
    479197128, 481878132, 484552460, 487220142, 489881214, 492535707,
    495183654, 497825086, 500460037, 503088537, 505710618, 508326312,
    510935650, 513538662, 516135378, 518725830, 521310048, 523888061,
    526459898, 529025591, 531585167, 534138657, 536686088, 539227490,
    541762891, 544292320, 546815803, 549333370, 551845048, 554350865,
    556850847, 559345022, 561833416, 564316057, 566792972, 569264185,
    571729724, 574189615, 576643883, 579092554, 581535654, 583973207,
    586405240, 588831776, 591252841, 593668459, 596078655, 598483453,
    600882877, 603276951, 605665699, 608049145, 610427311, 612800223,
    615167901, 617530370, 619887653, 622239772, 624586750, 626928608,
    629265371, 631597058, 633923694, 636245299, 638561895, 640873503,
    643180146, 645481844, 647778619, 650070492, 652357483, 654639613,
    656916903, 659189373, 661457044, 663719936, 665978069, 668231463,
    670480138, 672724113, 674963409, 677198044, 679428038, 681653410,
    683874180, 686090366, 688301988, 690509063, 692711611, 694909651,
    697103200, 699292276, 701476899, 703657087, 705832856, 708004225,
    710171213, 712333835, 714492111, 716646057, 718795691, 720941030,
    723082092, 725218892, 727351448, 729479778, 731603897, 733723822,
    735839570, 737951158, 740058601, 742161915, 744261118};

// 2^(j/256) in Q2.30, j = 0..256.

inline constexpr std::array<std::int64_t, 257> kExp2FracQ30 = {
    1073741824, 1076653033, 1079572136, 1082499153, 1085434106, 1088377016,
    1091327906, 1094286796, 1097253708, 1100228665, 1103211687, 1106202798,
    1109202018, 1112209370, 1115224875, 1118248556, 1121280436, 1124320536,
    1127368878, 1130425485, 1133490379, 1136563583, 1139645120, 1142735011,
    1145833280, 1148939949, 1152055042, 1155178580, 1158310587, 1161451085,
    1164600099, 1167757650, 1170923762, 1174098458, 1177281762, 1180473697,
    1183674286, 1186883552, 1190101520, 1193328213, 1196563654, 1199807867,
    1203060876, 1206322705, 1209593378, 1212872918, 1216161350, 1219458698,
    1222764986, 1226080238, 1229404479, 1232737732, 1236080024, 1239431376,
    1242791816, 1246161366, 1249540052, 1252927899, 1256324931, 1259731174,
    1263146652, 1266571390, 1270005413, 1273448747, 1276901417, 1280363448,
    1283834865, 1287315695, 1290805962, 1294305692, 1297814910, 1301333643,
    1304861917, 1308399756, 1311947188, 1315504238, 1319070932, 1322647296,
    1326233356, 1329829140, 1333434672, 1337049980, 1340675091, 1344310030,
    1347954824, 1351609500, 1355274085, 1358948606, 1362633090, 1366327563,
    1370032052, 1373746586, 1377471191, 1381205894, 1384950723, 1388705706,
    1392470869, 1396246240, 1400031848, 1403827719, 1407633882, 1411450365,
    1415277195, 1419114401, 1422962010, 1426820052, 1430688553, 1434567544,
    1438457051, 1442357104, 1446267730, 1450188960, 1454120821, 1458063343,
    1462016553, 1465980482, 1469955159, 1473940611, 1477936870, 1481943963,
    1485961921, 1489990772, 1494030547, 1498081275, 1502142985, 1506215708,
    1510299473, 1514394310, 1518500250, 1522617322, 1526745556, 1530884983,
    1535035634, 1539197537, 1543370725, 1547555228, 1551751076, 1555958300,
    1560176931, 1564406999, 1568648537, 1572901575, 1577166143, 1581442275,
    1585730000, 1590029350, 1594340357, 1598663052, 1602997467, 1607343634,
    1611701585, 1616071351, 1620452965, 1624846459, 1629251865, 1633669214,
    1638098541, 1642539877, 1646993254, 1651458706, 1655936265, 1660425963,
    1664927835, 1669441912, 1673968228, 1678506817, 1683057710, 1687620943,
    1692196547, 1696784557, 1701385007, 1705997930, 1710623359, 1715261330,
    1719911875, 1724575029, 1729250827, 1733939301, 1738640488, 1743354420,
    1748081133, 1752820662, 1757573041, 1762338305, 1767116489, 1771907628,
    1776711757, 1781528911, 1786359126, 1791202437, 1796058879, 1800928489,
    1805811301, 1810707353, 1815616678, 1820539314, 1825475297, 1830424663,
    1835387448, 1840363688, 1845353420, 1850356681, 1855373507, 1860403934,
    1865448001, 1870505744, 1875577199, 1880662405, 1885761398, 1890874216,
    1896000896, 1901141476, 1906295993, 1911464486, 1916646992, 1921843549,
    1927054196, 1932278970, 1937517909, 1942771053, 1948038440, 1953320108,
    1958616096, 1963926443, 1969251188, 1974590370, 1979944027, 1985312200,
    1990694927, 1996092249, 2001504204, 2006930832, 2012372174, 2017828268,
    2023299156, 2028784876, 2034285470, 2039800978, 2045331439, 2050876895,
    2056437387, 2062012954, 2067603638, 2073209480, 2078830522, 2084466803,
    2090118366, 2095785251, 2101467502, 2107165158, 2112878262, 2118606857,
    2124350982, 2130110682, 2135885998, 2141676973, 2147483648};

}  // namespace privade::numerics::tables
